#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mscale {

/// Copy numbers are signed so that a transiently negative state (a constrained
/// reset that overshoots) is representable before it is reverted.
using Count = std::int64_t;
using StateVector = std::vector<Count>;

/// How a reaction's stored rate maps to its propensity coefficient.
///   volume:   coefficient = rate * V^(1 - order)  (mass-action in concentration units)
///   combined: coefficient = rate, the volume factor is already folded in
///             (for parameter lists written as k/V or k*V)
enum class RateConvention { volume, combined };

struct Reaction {
  std::string label;
  std::vector<int> reactants;  // nu^- per species
  std::vector<int> products;   // nu^+ per species
  double rate = 0.0;
  RateConvention convention = RateConvention::volume;

  int order() const;
  int net_change(std::size_t species) const {
    return products[species] - reactants[species];
  }
};

class ReactionNetwork {
 public:
  ReactionNetwork() = default;
  /// Throws Error(invalid_argument) if stoichiometry sizes disagree, a rate is
  /// negative or non-finite, the volume is not positive, or a fast index is out
  /// of range or repeated. Every reaction not listed as fast is slow.
  ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions,
                  double volume, std::vector<std::size_t> fast_reactions);

  std::size_t species_count() const { return species_.size(); }
  std::size_t reaction_count() const { return reactions_.size(); }
  const std::vector<std::string>& species() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  const Reaction& reaction(std::size_t j) const { return reactions_.at(j); }
  double volume() const { return volume_; }

  bool is_fast(std::size_t j) const { return fast_mask_.at(j); }
  const std::vector<std::size_t>& fast_set() const { return fast_; }
  const std::vector<std::size_t>& slow_set() const { return slow_; }

  /// Propensity coefficient c_j with alpha_j(x) = c_j * prod_i x_i^(nu_ji falling).
  double coefficient(std::size_t j) const { return coefficients_.at(j); }

  /// Index of a species by name, or species_count() when absent.
  std::size_t species_index(std::string_view name) const;

 private:
  std::vector<std::string> species_;
  std::vector<Reaction> reactions_;
  double volume_ = 1.0;
  std::vector<std::size_t> fast_;
  std::vector<std::size_t> slow_;
  std::vector<bool> fast_mask_;
  std::vector<double> coefficients_;
};

/// S = c . X together with the integer grid S is studied on. The adjustment
/// species is the one whose copy number absorbs constrained resets of S.
struct SlowProjection {
  std::vector<int> coefficients;
  Count s_min = 0;
  Count s_max = 0;
  std::size_t adjust_species = 0;
};

/// Mass-action propensities. Zero whenever a species has fewer copies than the
/// reaction consumes. Throws Error(dimension_mismatch) on a size mismatch.
std::vector<double> propensities(const ReactionNetwork& network, std::span<const Count> state);
void propensities(const ReactionNetwork& network, std::span<const Count> state,
                  std::span<double> out);

struct AppliedReaction {
  StateVector state;
  bool negative = false;  // some component dropped below zero
};

AppliedReaction apply_reaction(std::span<const Count> state, const ReactionNetwork& network,
                               std::size_t j);

Count slow_value(const SlowProjection& projection, std::span<const Count> state);

/// c . nu_j, the change in S caused by reaction j.
Count slow_change(const SlowProjection& projection, const ReactionNetwork& network,
                  std::size_t j);

struct ValidationReport {
  bool valid = true;
  std::vector<std::string> violations;

  std::string to_string() const;
};

/// Never throws. Checks projection invariance under every fast reaction, the
/// reaction-order cap, grid ordering and the adjustment species.
ValidationReport validate_network(const ReactionNetwork& network,
                                  const SlowProjection& projection);

inline constexpr int max_reaction_order = 2;

}  // namespace mscale
