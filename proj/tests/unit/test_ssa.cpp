#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <cmath>

#include "doctest.h"
#include "mscale/error.hpp"
#include "mscale/ssa.hpp"
#include "mscale/systems.hpp"

using namespace mscale;

TEST_CASE("random streams are reproducible and distinct") {
  RandomStream a(42, 7);
  RandomStream b(42, 7);
  RandomStream c(42, 8);
  int same_as_c = 0;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    same_as_c += x == c.uniform();
    CHECK(x > 0.0);
    CHECK(x < 1.0);
  }
  CHECK(same_as_c == 0);
}

TEST_CASE("waiting times") {
  CHECK(waiting_time_for(1.0, std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(waiting_time_for(2.0, std::exp(-1.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(waiting_time_for(0.0, 0.5), Error);
  RandomStream rng(1, 0);
  CHECK_THROWS_AS(draw_waiting_time(-1.0, rng), Error);

  double sum = 0.0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) {
    const double tau = draw_waiting_time(4.0, rng);
    REQUIRE(tau > 0.0);
    sum += tau;
  }
  CHECK(std::abs(sum / n - 0.25) < 3.0 * 0.25 / 1000.0);
}

TEST_CASE("reaction selection") {
  const std::vector<double> single{0.0, 5.0, 0.0};
  RandomStream rng(2, 0);
  for (int i = 0; i < 1000; ++i) CHECK(select_reaction(single, rng) == 1);
  CHECK(reaction_for(single, 1e-300) == 1);
  CHECK(reaction_for(single, 1.0 - 1e-16) == 1);
  CHECK_THROWS_AS(select_reaction(std::vector<double>{0.0, 0.0}, rng), Error);

  const int n = 1'000'000;
  for (const auto& [weights, expect] :
       {std::pair{std::vector<double>{1.0, 1.0}, 0.5}, std::pair{std::vector<double>{3.0, 1.0}, 0.75}}) {
    int first = 0;
    for (int i = 0; i < n; ++i) first += select_reaction(weights, rng) == 0;
    CHECK(std::abs(first / double(n) - expect) < 0.002);
  }
}

TEST_CASE("pure birth reaches its Poisson mean") {
  ReactionNetwork net({"X"}, {{"birth", {0}, {1}, 1.0}}, 1.0, {});
  RandomStream rng(3, 0);
  const auto traj = simulate(net, StateVector{0}, 1e4, rng);
  CHECK(std::abs(static_cast<double>(traj.final_state[0]) - 1e4) < 300.0);
  CHECK(traj.final_time == 1e4);
  CHECK_FALSE(traj.absorbed);
}

TEST_CASE("trajectory samples are ordered and counts never decrease") {
  const auto spec = bistable_system();
  RandomStream rng(4, 0);
  RecorderOptions rec;
  rec.mode = Recording::states;
  rec.sample_interval = 0.001;
  const auto traj = simulate(spec.network, StateVector{100, 100}, 0.2, rng, rec);
  REQUIRE(traj.times.size() > 10);
  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    CHECK(traj.times[i] > traj.times[i - 1]);
    for (std::size_t j = 0; j < traj.counts[i].size(); ++j) {
      CHECK(traj.counts[i][j] >= traj.counts[i - 1][j]);
    }
  }
  // Recorded states are consistent with the firing counts.
  for (std::size_t i = 0; i < traj.times.size(); i += 17) {
    StateVector x{100, 100};
    for (std::size_t j = 0; j < traj.counts[i].size(); ++j) {
      for (std::size_t k = 0; k < 2; ++k) {
        x[k] += static_cast<Count>(traj.counts[i][j]) * spec.network.reaction(j).net_change(k);
      }
    }
    CHECK(x == traj.states[i]);
  }
}

TEST_CASE("fast dimerisation dominates the bistable firing counts") {
  const auto spec = bistable_system();
  RandomStream rng(5, 0);
  RecorderOptions rec;
  rec.max_events = 1'000'000;
  const auto traj = simulate(spec.network, StateVector{100, 100}, 1e9, rng, rec);
  CHECK(traj.events == 1'000'000);
  const auto& c = traj.final_counts;
  const auto slow_max = std::max({c[0], c[1], c[2], c[3]});
  CHECK(c[4] > 10 * slow_max);
  CHECK(c[5] > 10 * slow_max);
}

TEST_CASE("absorbing states stop the run with a flag") {
  ReactionNetwork net({"X"}, {{"death", {1}, {0}, 1.0}}, 1.0, {});
  RandomStream rng(6, 0);
  const auto traj = simulate(net, StateVector{5}, 1e6, rng);
  CHECK(traj.absorbed);
  CHECK(traj.final_state[0] == 0);
  CHECK(traj.events == 5);
}

TEST_CASE("linear system: time-averaged slow variable matches the exact mean") {
  LinearParameters p;
  p.K = 1000.0;
  const auto spec = linear_system(p);
  // Batch means over independent stretches give the standard error.
  const int batches = 20;
  std::vector<double> means;
  RandomStream rng(7, 0);
  StateVector x{100, 100};
  for (int b = 0; b < batches + 1; ++b) {
    const auto traj = simulate(spec.network, x, 10.0, rng);
    x = traj.final_state;
    if (b > 0) means.push_back(traj.time_average[0] + traj.time_average[1]);
  }
  double m = 0.0;
  for (double v : means) m += v;
  m /= batches;
  double var = 0.0;
  for (double v : means) var += (v - m) * (v - m);
  const double se = std::sqrt(var / (batches - 1) / batches);
  CHECK(std::abs(m - 200.1) < 3.0 * se);
}

TEST_CASE("linear system: sampled states pass a chi-square test against product Poisson") {
  const auto spec = linear_system();  // K = 10, X1 ~ Poisson(110), X2 ~ Poisson(100)
  RandomStream rng(8, 0);
  RecorderOptions rec;
  rec.mode = Recording::states;
  rec.sample_interval = 5.0;
  const auto traj = simulate(spec.network, StateVector{110, 100}, 5000.0, rng, rec);
  CHECK(traj.events > 10'000'000);

  // Four equiprobable-ish bins per species from the Poisson quantiles.
  const boost::math::poisson_distribution<double> law1(110.0);
  const boost::math::poisson_distribution<double> law2(100.0);
  auto edges = [](const auto& law) {
    std::vector<double> e;
    for (double q : {0.25, 0.5, 0.75}) e.push_back(boost::math::quantile(law, q));
    return e;
  };
  const auto e1 = edges(law1);
  const auto e2 = edges(law2);
  auto bin_of = [](const std::vector<double>& e, double x) {
    std::size_t b = 0;
    while (b < e.size() && x > e[b]) ++b;
    return b;
  };
  auto bin_prob = [](const auto& law, const std::vector<double>& e, std::size_t b) {
    const double hi = b < e.size() ? boost::math::cdf(law, e[b]) : 1.0;
    const double lo = b > 0 ? boost::math::cdf(law, e[b - 1]) : 0.0;
    return hi - lo;
  };
  std::vector<double> observed(16, 0.0);
  std::size_t n = 0;
  for (std::size_t i = 1; i < traj.states.size(); ++i) {
    const auto& s = traj.states[i];
    observed[bin_of(e1, double(s[0])) * 4 + bin_of(e2, double(s[1]))] += 1.0;
    ++n;
  }
  double chi2 = 0.0;
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      const double expected = n * bin_prob(law1, e1, a) * bin_prob(law2, e2, b);
      chi2 += (observed[a * 4 + b] - expected) * (observed[a * 4 + b] - expected) / expected;
    }
  }
  const double critical = boost::math::quantile(boost::math::chi_squared_distribution<double>(15.0), 0.99);
  CHECK(chi2 < critical);
}

TEST_CASE("simulation is bit-reproducible") {
  const auto spec = bistable_system();
  RecorderOptions rec;
  rec.mode = Recording::counts;
  rec.sample_interval = 0.01;
  RandomStream a(9, 3);
  RandomStream b(9, 3);
  const auto ta = simulate(spec.network, StateVector{100, 100}, 0.5, a, rec);
  const auto tb = simulate(spec.network, StateVector{100, 100}, 0.5, b, rec);
  CHECK(ta.counts == tb.counts);
  CHECK(ta.times == tb.times);
  CHECK(ta.final_state == tb.final_state);
}
