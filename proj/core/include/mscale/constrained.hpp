#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "mscale/random_stream.hpp"
#include "mscale/reaction_model.hpp"

namespace mscale {

/// When a constrained or fast-only run stops.
struct StopRule {
  enum class Kind { event_count, elapsed_time };
  Kind kind = Kind::event_count;
  double target = 0.0;

  static StopRule events(std::uint64_t n) { return {Kind::event_count, static_cast<double>(n)}; }
  static StopRule time(double t) { return {Kind::elapsed_time, t}; }
};

struct ConstrainedOptions {
  /// Leading share of the stopping budget that is simulated but not recorded.
  double burn_in_fraction = 0.01;
  /// Starting state; must satisfy c.x = s. Defaults to initial_fast_state().
  std::optional<StateVector> initial_state;
  /// Use the RRE relaxation for the default start (otherwise all mass is put
  /// on the adjustment species).
  bool rre_start = true;
};

struct JumpStatistics {
  Count s = 0;
  std::map<Count, std::uint64_t> increments;  // dS -> number of recorded firings
  double elapsed_time = 0.0;                  // recorded phase only
  std::uint64_t slow_event_count = 0;         // recorded phase only
  std::uint64_t fast_event_count = 0;         // recorded phase only
  std::uint64_t reverted_count = 0;           // recorded phase only
  std::uint64_t iterations = 0;               // every SSA step, burn-in included

  std::uint64_t increment_count() const;
  double increment_sum() const;
  double increment_square_sum() const;
};

/// Constrained SSA at slow value s: full-network SSA, every slow firing is
/// recorded as dS and S is reset to s through the adjustment species. Firings
/// that would make a species negative are reverted (their waiting time still
/// counts). Event-count rules count recorded slow events.
/// Throws Error(absorbing_state) naming s if the constrained chain gets stuck.
JumpStatistics run_cssa(const ReactionNetwork& network, const SlowProjection& projection, Count s,
                        const StopRule& stop, RandomStream& rng,
                        const ConstrainedOptions& options = {});

struct FastAverages {
  Count s = 0;
  std::vector<double> means;           // time-weighted E[X_i]
  std::vector<double> second_moments;  // E[X_i X_j], row-major N x N
  /// Time-weighted mean of every slow reaction's propensity (full network
  /// coefficients), in slow_set() order.
  std::vector<double> slow_propensity_means;
  std::uint64_t events = 0;      // fast events after burn-in
  std::uint64_t iterations = 0;  // every fast event, burn-in included
  bool degenerate = false;       // no fast reaction could fire at s
};

/// SSA restricted to the fast reactions at slow value s. The fast rates are
/// divided by the largest fast coefficient before simulating; the averages
/// are invariant under that change of time unit.
/// Throws Error(invalid_argument) if the fast set is empty or n_fast == 0.
FastAverages run_fast_subsystem(const ReactionNetwork& network, const SlowProjection& projection,
                                Count s, std::uint64_t n_fast, RandomStream& rng,
                                const ConstrainedOptions& options = {});

/// Integer state with c.x = s used to start constrained runs: the mean-field
/// fast-subsystem fixed point, rounded, with the adjustment species absorbing
/// the remainder; falls back to all mass on the adjustment species.
/// Throws Error(no_consistent_state) when neither yields a non-negative state.
StateVector initial_fast_state(const ReactionNetwork& network, const SlowProjection& projection,
                               Count s, bool use_rre = true);

}  // namespace mscale
