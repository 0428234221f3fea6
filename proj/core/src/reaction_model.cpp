#include "mscale/reaction_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mscale/error.hpp"

namespace mscale {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::absorbing_state: return "absorbing_state";
    case ErrorCode::no_consistent_state: return "no_consistent_state";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::singular_system: return "singular_system";
    case ErrorCode::non_convergence: return "non_convergence";
    case ErrorCode::reducible_generator: return "reducible_generator";
    case ErrorCode::domain_too_small: return "domain_too_small";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

int Reaction::order() const { return std::accumulate(reactants.begin(), reactants.end(), 0); }

ReactionNetwork::ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions,
                                 double volume, std::vector<std::size_t> fast_reactions)
    : species_(std::move(species)), reactions_(std::move(reactions)), volume_(volume) {
  if (species_.empty()) throw Error(ErrorCode::invalid_argument, "network has no species");
  if (!(volume_ > 0.0) || !std::isfinite(volume_)) {
    throw Error(ErrorCode::invalid_argument, "volume must be positive and finite");
  }
  const std::size_t n = species_.size();
  for (const auto& r : reactions_) {
    if (r.reactants.size() != n || r.products.size() != n) {
      throw Error(ErrorCode::invalid_argument,
                  "reaction " + r.label + ": stoichiometry length differs from species count");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (r.reactants[i] < 0 || r.products[i] < 0) {
        throw Error(ErrorCode::invalid_argument,
                    "reaction " + r.label + ": negative stoichiometric coefficient");
      }
    }
    if (!(r.rate >= 0.0) || !std::isfinite(r.rate)) {
      throw Error(ErrorCode::invalid_argument,
                  "reaction " + r.label + ": rate constant must be finite and >= 0");
    }
  }
  fast_mask_.assign(reactions_.size(), false);
  for (std::size_t j : fast_reactions) {
    if (j >= reactions_.size()) {
      throw Error(ErrorCode::invalid_argument, "fast reaction index out of range");
    }
    if (fast_mask_[j]) throw Error(ErrorCode::invalid_argument, "fast reaction listed twice");
    fast_mask_[j] = true;
  }
  for (std::size_t j = 0; j < reactions_.size(); ++j) {
    (fast_mask_[j] ? fast_ : slow_).push_back(j);
  }
  coefficients_.reserve(reactions_.size());
  for (const auto& r : reactions_) {
    if (r.convention == RateConvention::combined) {
      coefficients_.push_back(r.rate);
    } else {
      coefficients_.push_back(r.rate * std::pow(volume_, 1.0 - r.order()));
    }
  }
}

std::size_t ReactionNetwork::species_index(std::string_view name) const {
  auto it = std::find(species_.begin(), species_.end(), name);
  return static_cast<std::size_t>(it - species_.begin());
}

namespace {

void check_dimension(const ReactionNetwork& network, std::size_t size) {
  if (size != network.species_count()) {
    throw Error(ErrorCode::dimension_mismatch,
                "state has " + std::to_string(size) + " components, network has " +
                    std::to_string(network.species_count()) + " species");
  }
}

}  // namespace

void propensities(const ReactionNetwork& network, std::span<const Count> state,
                  std::span<double> out) {
  check_dimension(network, state.size());
  if (out.size() != network.reaction_count()) {
    throw Error(ErrorCode::dimension_mismatch, "propensity buffer has wrong length");
  }
  for (std::size_t j = 0; j < network.reaction_count(); ++j) {
    const auto& r = network.reaction(j);
    double a = network.coefficient(j);
    for (std::size_t i = 0; i < state.size() && a > 0.0; ++i) {
      // nu! * C(x, nu) is the falling factorial x (x-1) ... (x-nu+1)
      for (int m = 0; m < r.reactants[i]; ++m) {
        const Count f = state[i] - m;
        if (f <= 0) {
          a = 0.0;
          break;
        }
        a *= static_cast<double>(f);
      }
    }
    out[j] = a;
  }
}

std::vector<double> propensities(const ReactionNetwork& network, std::span<const Count> state) {
  std::vector<double> out(network.reaction_count());
  propensities(network, state, out);
  return out;
}

AppliedReaction apply_reaction(std::span<const Count> state, const ReactionNetwork& network,
                               std::size_t j) {
  check_dimension(network, state.size());
  const auto& r = network.reaction(j);
  AppliedReaction result{StateVector(state.begin(), state.end()), false};
  for (std::size_t i = 0; i < state.size(); ++i) {
    result.state[i] += r.net_change(i);
    if (result.state[i] < 0) result.negative = true;
  }
  return result;
}

Count slow_value(const SlowProjection& projection, std::span<const Count> state) {
  if (projection.coefficients.size() != state.size()) {
    throw Error(ErrorCode::dimension_mismatch, "projection and state differ in length");
  }
  Count s = 0;
  for (std::size_t i = 0; i < state.size(); ++i) s += projection.coefficients[i] * state[i];
  return s;
}

Count slow_change(const SlowProjection& projection, const ReactionNetwork& network,
                  std::size_t j) {
  const auto& r = network.reaction(j);
  Count d = 0;
  for (std::size_t i = 0; i < network.species_count(); ++i) {
    d += static_cast<Count>(projection.coefficients.at(i)) * r.net_change(i);
  }
  return d;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  os << (valid ? "valid" : "invalid");
  for (const auto& v : violations) os << "\n  - " << v;
  return os.str();
}

ValidationReport validate_network(const ReactionNetwork& network,
                                  const SlowProjection& projection) {
  ValidationReport report;
  auto fail = [&report](std::string msg) {
    report.valid = false;
    report.violations.push_back(std::move(msg));
  };

  const std::size_t n = network.species_count();
  if (projection.coefficients.size() != n) {
    fail("slow projection has " + std::to_string(projection.coefficients.size()) +
         " coefficients, network has " + std::to_string(n) + " species");
    return report;
  }
  if (projection.s_min > projection.s_max) fail("grid range is empty (s_min > s_max)");

  for (std::size_t j = 0; j < network.reaction_count(); ++j) {
    const auto& r = network.reaction(j);
    if (r.order() > max_reaction_order) {
      fail("reaction " + r.label + " has order " + std::to_string(r.order()) +
           "; orders above " + std::to_string(max_reaction_order) + " are not supported");
    }
    if (network.is_fast(j) && slow_change(projection, network, j) != 0) {
      fail("fast reaction " + r.label + " changes the slow variable by " +
           std::to_string(slow_change(projection, network, j)));
    }
  }

  if (projection.adjust_species >= n) {
    fail("adjustment species index out of range");
    return report;
  }
  const int c_adj = projection.coefficients[projection.adjust_species];
  if (c_adj == 0) {
    fail("adjustment species " + network.species()[projection.adjust_species] +
         " does not enter the slow variable");
  } else {
    for (std::size_t j : network.slow_set()) {
      if (slow_change(projection, network, j) % c_adj != 0) {
        fail("slow reaction " + network.reaction(j).label +
             " changes S by an amount the adjustment species cannot undo");
      }
    }
  }
  return report;
}

}  // namespace mscale
