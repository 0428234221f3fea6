#pragma once

// Flat, allocation-free view of a validated network for the simulation hot
// loops. Supports reactant order <= 2 (at most two reactant terms).

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mscale/error.hpp"
#include "mscale/reaction_model.hpp"

namespace mscale::detail {

/// Shape of the falling-factorial monomial.
enum class Form : std::uint8_t { constant, linear, square, pair };

struct CompiledReaction {
  double coefficient = 0.0;
  Form form = Form::constant;
  std::uint8_t term_count = 0;
  std::array<std::uint32_t, 2> species{};
  std::array<std::uint8_t, 2> power{};
  std::uint32_t change_begin = 0;
  std::uint32_t change_end = 0;
};

struct Change {
  std::uint32_t species;
  Count delta;
};

class CompiledNetwork {
 public:
  /// Compiles the listed reactions only; coefficients are multiplied by scale.
  CompiledNetwork(const ReactionNetwork& network, std::span<const std::size_t> subset,
                  double scale = 1.0)
      : species_count_(network.species_count()) {
    for (std::size_t j : subset) {
      const auto& r = network.reaction(j);
      CompiledReaction c;
      c.coefficient = network.coefficient(j) * scale;
      for (std::size_t i = 0; i < network.species_count(); ++i) {
        if (r.reactants[i] == 0) continue;
        if (c.term_count == 2 || r.reactants[i] > 2) {
          throw Error(ErrorCode::invalid_argument,
                      "reaction " + r.label + " exceeds the supported reaction order");
        }
        c.species[c.term_count] = static_cast<std::uint32_t>(i);
        c.power[c.term_count] = static_cast<std::uint8_t>(r.reactants[i]);
        ++c.term_count;
      }
      if (c.term_count == 2 && (c.power[0] != 1 || c.power[1] != 1)) {
        throw Error(ErrorCode::invalid_argument,
                    "reaction " + r.label + " exceeds the supported reaction order");
      }
      if (c.term_count == 1) {
        c.form = c.power[0] == 1 ? Form::linear : Form::square;
      } else if (c.term_count == 2) {
        c.form = Form::pair;
      }
      c.change_begin = static_cast<std::uint32_t>(changes_.size());
      for (std::size_t i = 0; i < network.species_count(); ++i) {
        if (r.net_change(i) != 0) {
          changes_.push_back({static_cast<std::uint32_t>(i), r.net_change(i)});
        }
      }
      c.change_end = static_cast<std::uint32_t>(changes_.size());
      reactions_.push_back(c);
      source_.push_back(j);
    }
  }

  std::size_t size() const { return reactions_.size(); }
  std::size_t species_count() const { return species_count_; }
  std::size_t source_index(std::size_t k) const { return source_[k]; }
  const CompiledReaction& reaction(std::size_t k) const { return reactions_[k]; }
  std::span<const Change> changes(std::size_t k) const {
    const auto& r = reactions_[k];
    return {changes_.data() + r.change_begin, changes_.data() + r.change_end};
  }

  double propensity(std::size_t k, const Count* x) const {
    const auto& r = reactions_[k];
    switch (r.form) {
      case Form::constant:
        return r.coefficient;
      case Form::linear: {
        const Count v = x[r.species[0]];
        return v > 0 ? r.coefficient * static_cast<double>(v) : 0.0;
      }
      case Form::square: {
        const Count v = x[r.species[0]];
        return v > 1 ? r.coefficient * static_cast<double>(v * (v - 1)) : 0.0;
      }
      case Form::pair: {
        const Count v = x[r.species[0]];
        const Count w = x[r.species[1]];
        return v > 0 && w > 0 ? r.coefficient * static_cast<double>(v) * static_cast<double>(w)
                              : 0.0;
      }
    }
    return 0.0;
  }

  /// Fills out[0..size) and returns the total.
  double all_propensities(const Count* x, double* out) const {
    double total = 0.0;
    for (std::size_t k = 0; k < reactions_.size(); ++k) {
      out[k] = propensity(k, x);
      total += out[k];
    }
    return total;
  }

  bool depends_on(std::size_t k, std::size_t species) const {
    const auto& r = reactions_[k];
    for (std::uint8_t t = 0; t < r.term_count; ++t) {
      if (r.species[t] == species) return true;
    }
    return false;
  }

  /// For every reaction j, the reactions whose propensity can change when the
  /// species in touched[j] change.
  std::vector<std::vector<std::uint32_t>> dependency_graph(
      const std::vector<std::vector<std::uint32_t>>& touched) const {
    std::vector<std::vector<std::uint32_t>> out(touched.size());
    for (std::size_t j = 0; j < touched.size(); ++j) {
      for (std::size_t k = 0; k < reactions_.size(); ++k) {
        for (auto sp : touched[j]) {
          if (depends_on(k, sp)) {
            out[j].push_back(static_cast<std::uint32_t>(k));
            break;
          }
        }
      }
    }
    return out;
  }

  /// Smallest k with a[0] + ... + a[k] > target and a[k] > 0, given
  /// 0 <= target < sum(a). Rounding at the top end falls back to the last
  /// positive entry.
  std::size_t select(const double* a, double target) const {
    const std::size_t m = reactions_.size();
    // Branch-free count of partial sums <= target; the first partial sum
    // above target always belongs to a positive entry.
    double acc = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < m; ++i) {
      acc += a[i];
      k += acc <= target;
    }
    if (k < m) return k;
    while (k > 0 && a[k - 1] <= 0.0) --k;
    return k == 0 ? 0 : k - 1;
  }

  /// Same polynomial evaluated at a real-valued (mean-field) state.
  double propensity_at(std::size_t k, const double* x) const {
    const auto& r = reactions_[k];
    double a = r.coefficient;
    for (std::uint8_t t = 0; t < r.term_count; ++t) {
      const double v = x[r.species[t]];
      a *= r.power[t] == 1 ? v : v * (v - 1.0);
    }
    return a > 0.0 ? a : 0.0;
  }

 private:
  std::size_t species_count_;
  std::vector<CompiledReaction> reactions_;
  std::vector<Change> changes_;
  std::vector<std::size_t> source_;
};

inline std::vector<std::size_t> all_reactions(const ReactionNetwork& network) {
  std::vector<std::size_t> idx(network.reaction_count());
  for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = j;
  return idx;
}

}  // namespace mscale::detail
