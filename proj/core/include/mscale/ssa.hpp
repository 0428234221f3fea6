#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mscale/random_stream.hpp"
#include "mscale/reaction_model.hpp"

namespace mscale {

/// -log(u) / total. Throws Error(absorbing_state) when total <= 0.
double waiting_time_for(double total_propensity, double u);
double draw_waiting_time(double total_propensity, RandomStream& rng);

/// Smallest j with sum_{i<=j} a_i > u * total. Zero-propensity reactions are
/// never returned. Throws Error(absorbing_state) when every entry is zero.
std::size_t reaction_for(std::span<const double> propensities, double u);
std::size_t select_reaction(std::span<const double> propensities, RandomStream& rng);

enum class Recording {
  nothing,  // final state, counts and time averages only
  counts,   // cumulative firing counts at each sample
  states,   // states and cumulative firing counts at each sample
};

struct RecorderOptions {
  Recording mode = Recording::nothing;
  /// Sample spacing in time; 0 records after every event.
  double sample_interval = 0.0;
  /// Stop once this many events have fired (0 means unlimited).
  std::uint64_t max_events = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  std::vector<std::vector<std::uint64_t>> counts;

  StateVector final_state;
  std::vector<std::uint64_t> final_counts;
  double final_time = 0.0;
  std::uint64_t events = 0;
  bool absorbed = false;
  /// Time-weighted mean copy numbers over [0, final_time].
  std::vector<double> time_average;
};

/// Gillespie direct method on [0, t_end]. An absorbing state stops the run
/// early with absorbed = true instead of throwing.
Trajectory simulate(const ReactionNetwork& network, std::span<const Count> initial_state,
                    double t_end, RandomStream& rng, const RecorderOptions& recorder = {});

}  // namespace mscale
