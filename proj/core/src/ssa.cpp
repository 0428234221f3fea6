#include "mscale/ssa.hpp"

#include <cmath>

#include "compiled_network.hpp"
#include "mscale/error.hpp"

namespace mscale {

double waiting_time_for(double total_propensity, double u) {
  if (!(total_propensity > 0.0)) {
    throw Error(ErrorCode::absorbing_state, "total propensity is zero, no reaction can fire");
  }
  return -std::log(u) / total_propensity;
}

double draw_waiting_time(double total_propensity, RandomStream& rng) {
  return waiting_time_for(total_propensity, rng.uniform());
}

std::size_t reaction_for(std::span<const double> propensities, double u) {
  double total = 0.0;
  std::size_t last_positive = propensities.size();
  for (std::size_t j = 0; j < propensities.size(); ++j) {
    total += propensities[j];
    if (propensities[j] > 0.0) last_positive = j;
  }
  if (last_positive == propensities.size()) {
    throw Error(ErrorCode::absorbing_state, "all propensities are zero");
  }
  const double target = u * total;
  double acc = 0.0;
  for (std::size_t j = 0; j < last_positive; ++j) {
    acc += propensities[j];
    if (propensities[j] > 0.0 && acc > target) return j;
  }
  return last_positive;
}

std::size_t select_reaction(std::span<const double> propensities, RandomStream& rng) {
  return reaction_for(propensities, rng.uniform());
}

Trajectory simulate(const ReactionNetwork& network, std::span<const Count> initial_state,
                    double t_end, RandomStream& rng, const RecorderOptions& recorder) {
  if (initial_state.size() != network.species_count()) {
    throw Error(ErrorCode::dimension_mismatch, "initial state size does not match network");
  }
  if (!(t_end > 0.0)) throw Error(ErrorCode::invalid_argument, "t_end must be positive");

  const auto all = detail::all_reactions(network);
  const detail::CompiledNetwork net(network, all);
  const std::size_t n = network.species_count();
  const std::size_t m = net.size();

  Trajectory out;
  StateVector x(initial_state.begin(), initial_state.end());
  std::vector<std::uint64_t> counts(m, 0);
  std::vector<double> a(m);
  std::vector<double> weighted(n, 0.0);

  const bool mesh = recorder.sample_interval > 0.0;
  double next_sample = 0.0;
  auto record = [&](double t) {
    if (recorder.mode == Recording::nothing) return;
    out.times.push_back(t);
    out.counts.push_back(counts);
    if (recorder.mode == Recording::states) out.states.push_back(x);
  };
  // Emits the mesh points before `until` (or up to t_end inclusive) with the
  // state that was in effect at those times.
  auto record_mesh = [&](double until) {
    while ((next_sample < until || until == t_end) && next_sample <= t_end) {
      record(next_sample);
      next_sample += recorder.sample_interval;
    }
  };
  if (!mesh) record(0.0);

  double t = 0.0;
  while (true) {
    const double total = net.all_propensities(x.data(), a.data());
    if (!(total > 0.0)) {
      out.absorbed = true;
      for (std::size_t i = 0; i < n; ++i) weighted[i] += static_cast<double>(x[i]) * (t_end - t);
      if (mesh) record_mesh(t_end);
      t = t_end;
      break;
    }
    const double tau = -std::log(rng.uniform()) / total;
    const double u = rng.uniform();
    if (t + tau > t_end) {
      for (std::size_t i = 0; i < n; ++i) weighted[i] += static_cast<double>(x[i]) * (t_end - t);
      if (mesh) record_mesh(t_end);
      t = t_end;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) weighted[i] += static_cast<double>(x[i]) * tau;
    t += tau;
    if (mesh) record_mesh(t);
    const std::size_t j = net.select(a.data(), u * total);
    for (const auto& c : net.changes(j)) x[c.species] += c.delta;
    ++counts[j];
    ++out.events;
    if (!mesh) record(t);
    if (recorder.max_events != 0 && out.events >= recorder.max_events) break;
  }

  out.final_state = x;
  out.final_counts = counts;
  out.final_time = t;
  out.time_average.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.time_average[i] = t > 0.0 ? weighted[i] / t : static_cast<double>(x[i]);
  }
  return out;
}

}  // namespace mscale
