#include <cmath>

#include "doctest.h"
#include "mscale/constrained.hpp"
#include "mscale/error.hpp"
#include "mscale/estimators.hpp"
#include "mscale/systems.hpp"
#include "oracles.hpp"

using namespace mscale;

namespace {
NetworkSpec linear_at(double K) {
  LinearParameters p;
  p.K = K;
  return linear_system(p);
}
}  // namespace

TEST_CASE("constrained SSA on the linear system matches the constrained-chain oracle") {
  const auto spec = linear_at(200.0);
  RandomStream rng(1, 200);
  const auto stats = run_cssa(spec.network, spec.projection, 200, StopRule::events(1'000'000), rng);
  CHECK(stats.slow_event_count == 990'000);  // first 1% is burn-in
  CHECK(stats.increment_count() == stats.slow_event_count);
  for (const auto& [ds, n] : stats.increments) CHECK((ds == 1 || ds == -1));

  const auto est = cma_estimate(stats);
  const auto exact = oracle::constrained_linear(1.0, 1.0, 100.0, 200.0, 200);
  CHECK(exact.drift == doctest::Approx(0.2494).epsilon(1e-3));
  CHECK(exact.diffusion == doctest::Approx(99.875).epsilon(1e-4));
  const double T = stats.elapsed_time;
  const double se_v = std::sqrt(stats.increment_square_sum()) / T;
  const double se_d = std::sqrt(static_cast<double>(stats.increment_count())) / (2.0 * T);
  CHECK(std::abs(est.drift - exact.drift) < 3.0 * se_v);
  CHECK(std::abs(est.diffusion - exact.diffusion) < 3.0 * se_d);
  CHECK(stats.iterations > stats.slow_event_count);
}

TEST_CASE("constrained SSA on the bistable system records unit jumps") {
  const auto spec = bistable_system();
  RandomStream rng(2, 300);
  const auto stats = run_cssa(spec.network, spec.projection, 300, StopRule::events(20'000), rng);
  REQUIRE_FALSE(stats.increments.empty());
  for (const auto& [ds, n] : stats.increments) CHECK((ds == 1 || ds == -1));
  CHECK(stats.elapsed_time > 0.0);
  CHECK(stats.fast_event_count > stats.slow_event_count);
}

TEST_CASE("elapsed-time stopping rule") {
  const auto spec = linear_at(10.0);
  RandomStream rng(3, 0);
  const auto stats = run_cssa(spec.network, spec.projection, 150, StopRule::time(50.0), rng);
  CHECK(stats.elapsed_time == doctest::Approx(50.0 * 0.99).epsilon(0.02));
  CHECK(stats.slow_event_count > 0);
}

TEST_CASE("resets that would go negative are reverted") {
  // S = A + B with A absorbing resets; 0 -> B raises S and the reset must take
  // a copy of A, which fails whenever A = 0.
  ReactionNetwork net({"A", "B"},
                      {{"inB", {0, 0}, {0, 1}, 50.0},
                       {"outB", {0, 1}, {0, 0}, 1.0},
                       {"AtoB", {1, 0}, {0, 1}, 10.0},
                       {"BtoA", {0, 1}, {1, 0}, 1.0}},
                      1.0, {2, 3});
  SlowProjection proj{{1, 1}, 0, 10, 0};
  RandomStream rng(4, 0);
  const auto stats = run_cssa(net, proj, 5, StopRule::events(5000), rng);
  CHECK(stats.reverted_count > 0);
  CHECK(stats.increment_count() == stats.slow_event_count);
  CHECK(stats.slow_event_count == 4950);
}

TEST_CASE("constrained runs are bit-reproducible") {
  const auto spec = linear_at(10.0);
  RandomStream a(5, 17);
  RandomStream b(5, 17);
  const auto sa = run_cssa(spec.network, spec.projection, 150, StopRule::events(3000), a);
  const auto sb = run_cssa(spec.network, spec.projection, 150, StopRule::events(3000), b);
  CHECK(sa.increments == sb.increments);
  CHECK(sa.elapsed_time == sb.elapsed_time);
  CHECK(sa.iterations == sb.iterations);
}

TEST_CASE("fast subsystem of the linear system averages to s/2") {
  const auto spec = linear_at(10.0);
  std::vector<double> means;
  for (std::uint64_t r = 0; r < 10; ++r) {
    RandomStream rng(6, r);
    const auto avg = run_fast_subsystem(spec.network, spec.projection, 200, 10'000'000, rng);
    CHECK_FALSE(avg.degenerate);
    CHECK(avg.means[0] + avg.means[1] == doctest::Approx(200.0));
    means.push_back(avg.means[1]);
  }
  double m = 0.0;
  for (double v : means) m += v;
  m /= means.size();
  double var = 0.0;
  for (double v : means) var += (v - m) * (v - m);
  const double se = std::sqrt(var / (means.size() - 1) / means.size());
  CHECK(std::abs(m - 100.0) < 3.0 * se);
  CHECK(se < 0.05);
}

TEST_CASE("fast subsystem outputs do not depend on the exchange rate K") {
  for (double K : {10.0, 200.0, 1000.0}) {
    const auto spec = linear_at(K);
    RandomStream rng(7, 3);
    const auto avg = run_fast_subsystem(spec.network, spec.projection, 180, 10'000, rng);
    RandomStream ref_rng(7, 3);
    const auto base = linear_at(10.0);
    const auto ref = run_fast_subsystem(base.network, base.projection, 180, 10'000, ref_rng);
    CHECK(avg.means == ref.means);
    CHECK(avg.events == ref.events);
  }
}

TEST_CASE("fast dimerisation mean is close to the rate-equation fixed point") {
  const auto spec = bistable_system();
  RandomStream rng(8, 300);
  const auto avg = run_fast_subsystem(spec.network, spec.projection, 300, 2'000'000, rng);
  const double rre = oracle::dimer_mean_x1(10.0, 4000.0, 300.0);
  CHECK(rre == doctest::Approx(100.0 * (std::sqrt(7.0) - 1.0)));
  // Copy-number fluctuations shift the stochastic mean by O(1) molecules.
  CHECK(std::abs(avg.means[0] - rre) < 2.0);
  CHECK(avg.means[0] + 2.0 * avg.means[1] == doctest::Approx(300.0));
}

TEST_CASE("fast subsystem at s = 0 is degenerate") {
  const auto spec = linear_at(10.0);
  RandomStream rng(9, 0);
  const auto avg = run_fast_subsystem(spec.network, spec.projection, 0, 1000, rng);
  CHECK(avg.degenerate);
  CHECK(avg.means == std::vector<double>{0.0, 0.0});
  CHECK_THROWS_AS(run_fast_subsystem(spec.network, spec.projection, 10, 0, rng), Error);
}

TEST_CASE("initial fast state") {
  const auto lin = linear_at(10.0);
  auto x = initial_fast_state(lin.network, lin.projection, 200);
  CHECK(slow_value(lin.projection, x) == 200);
  CHECK(x[0] >= 0);
  CHECK(x[1] >= 0);
  CHECK(std::abs(x[1] - 100) <= 1);

  const auto bis = bistable_system();
  x = initial_fast_state(bis.network, bis.projection, 300);
  CHECK(slow_value(bis.projection, x) == 300);
  CHECK(std::abs(static_cast<double>(x[0]) - 164.58) < 2.0);

  x = initial_fast_state(bis.network, bis.projection, 300, false);
  CHECK(x == StateVector{300, 0});

  ReactionNetwork only_dimer({"A", "B"}, {{"d", {0, 1}, {0, 0}, 1.0}}, 1.0, {});
  SlowProjection even{{2, 1}, 0, 10, 0};
  try {
    initial_fast_state(only_dimer, even, -1);
    FAIL("expected no_consistent_state");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::no_consistent_state);
  }
}
