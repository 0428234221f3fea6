#include "mscale/constrained.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "compiled_network.hpp"
#include "mscale/error.hpp"

namespace mscale {

double JumpStatistics::increment_sum() const {
  double total = 0.0;
  for (const auto& [ds, n] : increments) total += static_cast<double>(ds) * static_cast<double>(n);
  return total;
}

std::uint64_t JumpStatistics::increment_count() const {
  std::uint64_t total = 0;
  for (const auto& [ds, n] : increments) total += n;
  return total;
}

double JumpStatistics::increment_square_sum() const {
  double total = 0.0;
  for (const auto& [ds, n] : increments) {
    total += static_cast<double>(ds) * static_cast<double>(ds) * static_cast<double>(n);
  }
  return total;
}

namespace {

void check_projection(const ReactionNetwork& network, const SlowProjection& projection) {
  if (projection.coefficients.size() != network.species_count()) {
    throw Error(ErrorCode::dimension_mismatch, "projection size does not match network");
  }
  if (projection.adjust_species >= network.species_count() ||
      projection.coefficients[projection.adjust_species] == 0) {
    throw Error(ErrorCode::invalid_argument, "adjustment species has a zero coefficient");
  }
}

std::optional<StateVector> all_on_adjust(const SlowProjection& projection, std::size_t n, Count s) {
  const Count c = projection.coefficients[projection.adjust_species];
  if (s % c != 0 || s / c < 0) return std::nullopt;
  StateVector x(n, 0);
  x[projection.adjust_species] = s / c;
  return x;
}

/// Sum of |d a / d y_i| over the reactants of one compiled reaction.
double gradient_bound(const detail::CompiledReaction& r, const double* y) {
  double g = 0.0;
  for (std::uint8_t t = 0; t < r.term_count; ++t) {
    const double v = std::max(y[r.species[t]], 0.0);
    double d = r.power[t] == 1 ? 1.0 : std::abs(2.0 * v - 1.0);
    for (std::uint8_t o = 0; o < r.term_count; ++o) {
      if (o == t) continue;
      const double w = std::max(y[r.species[o]], 0.0);
      d *= r.power[o] == 1 ? w : w * std::abs(w - 1.0);
    }
    g += d;
  }
  return r.coefficient * g;
}

/// Explicit Euler relaxation of the fast reaction rate equations.
std::vector<double> relax_fast(const detail::CompiledNetwork& fast, std::vector<double> y,
                               double s_scale) {
  const std::size_t n = y.size();
  std::vector<double> f(n);
  for (int step = 0; step < 200000; ++step) {
    std::fill(f.begin(), f.end(), 0.0);
    double bound = 0.0;
    for (std::size_t k = 0; k < fast.size(); ++k) {
      const double a = fast.propensity_at(k, y.data());
      double nu = 0.0;
      for (const auto& c : fast.changes(k)) {
        f[c.species] += static_cast<double>(c.delta) * a;
        nu += std::abs(static_cast<double>(c.delta));
      }
      bound += nu * gradient_bound(fast.reaction(k), y.data());
    }
    double fmax = 0.0;
    for (double v : f) fmax = std::max(fmax, std::abs(v));
    if (bound <= 0.0 || fmax <= 1e-12 * bound * s_scale) break;
    const double dt = 0.5 / bound;
    for (std::size_t i = 0; i < n; ++i) y[i] = std::max(0.0, y[i] + dt * f[i]);
  }
  return y;
}

double fast_scale(const ReactionNetwork& network) {
  double top = 0.0;
  for (std::size_t j : network.fast_set()) top = std::max(top, network.coefficient(j));
  return top > 0.0 ? 1.0 / top : 1.0;
}

StateVector starting_state(const ReactionNetwork& network, const SlowProjection& projection,
                           Count s, const ConstrainedOptions& options) {
  if (!options.initial_state) return initial_fast_state(network, projection, s, options.rre_start);
  const StateVector& x = *options.initial_state;
  if (x.size() != network.species_count()) {
    throw Error(ErrorCode::dimension_mismatch, "initial state size does not match network");
  }
  if (slow_value(projection, x) != s) {
    throw Error(ErrorCode::invalid_argument,
                "initial state is not on the slow level s = " + std::to_string(s));
  }
  if (std::any_of(x.begin(), x.end(), [](Count v) { return v < 0; })) {
    throw Error(ErrorCode::invalid_argument, "initial state has a negative copy number");
  }
  return x;
}

std::uint64_t burn_in_events(double fraction, std::uint64_t budget) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "burn-in fraction must lie in [0, 1)");
  }
  return static_cast<std::uint64_t>(std::floor(fraction * static_cast<double>(budget)));
}

}  // namespace

StateVector initial_fast_state(const ReactionNetwork& network, const SlowProjection& projection,
                               Count s, bool use_rre) {
  check_projection(network, projection);
  const std::size_t n = network.species_count();
  auto base = all_on_adjust(projection, n, s);
  if (!base) {
    throw Error(ErrorCode::no_consistent_state,
                "no non-negative state with all mass on the adjustment species at s = " +
                    std::to_string(s));
  }
  if (!use_rre || network.fast_set().empty()) return *base;

  const detail::CompiledNetwork fast(network, network.fast_set(), fast_scale(network));
  std::vector<double> y(base->begin(), base->end());
  y = relax_fast(fast, std::move(y), static_cast<double>(std::abs(s)) + 1.0);

  const std::size_t a = projection.adjust_species;
  StateVector x(n, 0);
  Count rest = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == a) continue;
    x[i] = std::llround(y[i]);
    rest += projection.coefficients[i] * x[i];
  }
  const Count c = projection.coefficients[a];
  const Count remainder = s - rest;
  if (remainder % c != 0 || remainder / c < 0 ||
      std::any_of(x.begin(), x.end(), [](Count v) { return v < 0; })) {
    return *base;
  }
  x[a] = remainder / c;
  return x;
}

JumpStatistics run_cssa(const ReactionNetwork& network, const SlowProjection& projection, Count s,
                        const StopRule& stop, RandomStream& rng,
                        const ConstrainedOptions& options) {
  check_projection(network, projection);
  if (!(stop.target > 0.0)) throw Error(ErrorCode::invalid_argument, "stopping budget must be positive");

  const auto all = detail::all_reactions(network);
  const detail::CompiledNetwork net(network, all);
  const std::size_t m = net.size();
  const std::size_t adjust = projection.adjust_species;
  const Count c_adjust = projection.coefficients[adjust];

  std::vector<char> slow(m, 0);
  std::vector<Count> ds(m, 0);
  std::vector<Count> reset(m, 0);
  for (std::size_t j : network.slow_set()) {
    slow[j] = 1;
    ds[j] = slow_change(projection, network, j);
    if (ds[j] % c_adjust != 0) {
      throw Error(ErrorCode::invalid_argument, "adjustment species cannot absorb the change of " +
                                                   network.reaction(j).label);
    }
    reset[j] = -ds[j] / c_adjust;
  }

  // Net effect of each step including the reset, so a slow firing and its
  // reset are applied (and reverted) together.
  struct Delta {
    std::uint32_t species;
    Count delta;
  };
  std::vector<Delta> deltas;
  std::vector<std::uint32_t> delta_begin(m + 1, 0);
  std::vector<std::vector<std::uint32_t>> touched(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<Count> net_change(network.species_count(), 0);
    for (const auto& c : net.changes(j)) net_change[c.species] += c.delta;
    if (slow[j]) net_change[adjust] += reset[j];
    delta_begin[j] = static_cast<std::uint32_t>(deltas.size());
    for (std::size_t i = 0; i < net_change.size(); ++i) {
      if (net_change[i] == 0) continue;
      deltas.push_back({static_cast<std::uint32_t>(i), net_change[i]});
      touched[j].push_back(static_cast<std::uint32_t>(i));
    }
  }
  delta_begin[m] = static_cast<std::uint32_t>(deltas.size());
  const auto update = net.dependency_graph(touched);

  StateVector x = starting_state(network, projection, s, options);
  std::vector<double> a(m);
  net.all_propensities(x.data(), a.data());

  const bool by_events = stop.kind == StopRule::Kind::event_count;
  std::uint64_t burn_events = 0;
  std::uint64_t target_events = 0;
  double burn_time = 0.0;
  double target_time = 0.0;
  if (by_events) {
    const auto budget = static_cast<std::uint64_t>(stop.target);
    burn_events = burn_in_events(options.burn_in_fraction, budget);
    target_events = budget - burn_events;
  } else {
    burn_time = options.burn_in_fraction * stop.target;
    target_time = stop.target - burn_time;
  }

  JumpStatistics st;
  st.s = s;
  std::vector<std::uint64_t> fired(m, 0);
  bool recording = by_events ? burn_events == 0 : burn_time <= 0.0;
  std::uint64_t burned = 0;
  double burned_time = 0.0;
  Count* xs = x.data();

  while (true) {
    double total = 0.0;
    for (std::size_t k = 0; k < m; ++k) total += a[k];
    if (!(total > 0.0)) {
      throw Error(ErrorCode::absorbing_state,
                  "constrained chain is absorbed at s = " + std::to_string(s));
    }
    const double tau = -std::log(rng.uniform()) / total;
    const double target = rng.uniform() * total;
    const std::size_t j = net.select(a.data(), target);
    ++st.iterations;

    if (!by_events) {
      if (recording && st.elapsed_time + tau >= target_time) {
        st.elapsed_time = target_time;
        break;
      }
      if (!recording && burned_time + tau >= burn_time) {
        recording = true;
        continue;
      }
    }

    bool negative = false;
    for (std::uint32_t d = delta_begin[j]; d < delta_begin[j + 1]; ++d) {
      negative |= (xs[deltas[d].species] += deltas[d].delta) < 0;
    }
    if (negative) {
      for (std::uint32_t d = delta_begin[j]; d < delta_begin[j + 1]; ++d) {
        xs[deltas[d].species] -= deltas[d].delta;
      }
      if (recording) {
        ++st.reverted_count;
        st.elapsed_time += tau;
      } else {
        burned_time += tau;
      }
      continue;
    }
    assert(slow_value(projection, x) == s);
    for (auto k : update[j]) a[k] = net.propensity(k, xs);

    if (!recording) {
      burned_time += tau;
      if (by_events && slow[j] && ++burned >= burn_events) recording = true;
      continue;
    }
    st.elapsed_time += tau;
    ++fired[j];
    if (slow[j]) {
      if (by_events && ++st.slow_event_count >= target_events) break;
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (slow[j]) {
      if (fired[j] > 0) st.increments[ds[j]] += fired[j];
    } else {
      st.fast_event_count += fired[j];
    }
  }
  if (!by_events) st.slow_event_count = st.increment_count();
  return st;
}

FastAverages run_fast_subsystem(const ReactionNetwork& network, const SlowProjection& projection,
                                Count s, std::uint64_t n_fast, RandomStream& rng,
                                const ConstrainedOptions& options) {
  check_projection(network, projection);
  if (network.fast_set().empty()) {
    throw Error(ErrorCode::invalid_argument, "network has no fast reactions");
  }
  if (n_fast == 0) {
    throw Error(ErrorCode::invalid_argument, "fast-event budget must be positive");
  }
  const detail::CompiledNetwork fast(network, network.fast_set(), fast_scale(network));
  const detail::CompiledNetwork slow(network, network.slow_set());
  const std::size_t n = network.species_count();
  const std::size_t mf = fast.size();
  const std::size_t ms = slow.size();

  StateVector x = starting_state(network, projection, s, options);
  std::vector<double> a(mf);
  std::vector<double> sum_x(n, 0.0);
  std::vector<double> sum_xx(n * n, 0.0);
  std::vector<double> sum_slow(ms, 0.0);
  double elapsed = 0.0;

  FastAverages out;
  out.s = s;
  const std::uint64_t burn = burn_in_events(options.burn_in_fraction, n_fast);
  bool absorbed = false;
  for (std::uint64_t step = 0; step < n_fast; ++step) {
    const double total = fast.all_propensities(x.data(), a.data());
    if (!(total > 0.0)) {
      absorbed = true;
      break;
    }
    const double tau = -std::log(rng.uniform()) / total;
    const double target = rng.uniform() * total;
    const std::size_t j = fast.select(a.data(), target);
    ++out.iterations;
    if (step >= burn) {
      for (std::size_t i = 0; i < n; ++i) {
        const double xi = static_cast<double>(x[i]);
        sum_x[i] += xi * tau;
        for (std::size_t k = 0; k < n; ++k) sum_xx[i * n + k] += xi * static_cast<double>(x[k]) * tau;
      }
      for (std::size_t k = 0; k < ms; ++k) sum_slow[k] += slow.propensity(k, x.data()) * tau;
      elapsed += tau;
      ++out.events;
    }
    for (const auto& c : fast.changes(j)) x[c.species] += c.delta;
    assert(slow_value(projection, x) == s);
  }

  out.means.resize(n);
  out.second_moments.resize(n * n);
  out.slow_propensity_means.resize(ms);
  if (absorbed || !(elapsed > 0.0)) {
    // The chain sits in x forever, so x carries all of the long-run weight.
    out.degenerate = true;
    for (std::size_t i = 0; i < n; ++i) {
      out.means[i] = static_cast<double>(x[i]);
      for (std::size_t k = 0; k < n; ++k) {
        out.second_moments[i * n + k] = static_cast<double>(x[i]) * static_cast<double>(x[k]);
      }
    }
    for (std::size_t k = 0; k < ms; ++k) out.slow_propensity_means[k] = slow.propensity(k, x.data());
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) out.means[i] = sum_x[i] / elapsed;
  for (std::size_t i = 0; i < n * n; ++i) out.second_moments[i] = sum_xx[i] / elapsed;
  for (std::size_t k = 0; k < ms; ++k) out.slow_propensity_means[k] = sum_slow[k] / elapsed;
  return out;
}

}  // namespace mscale
