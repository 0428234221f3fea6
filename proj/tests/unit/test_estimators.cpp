#include <cmath>
#include <filesystem>
#include <sstream>

#include "doctest.h"
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

int sign_changes(const std::vector<double>& v) {
  int n = 0;
  for (std::size_t i = 1; i < v.size(); ++i) n += (v[i - 1] > 0.0) != (v[i] > 0.0);
  return n;
}
}  // namespace

TEST_CASE("cma_estimate") {
  JumpStatistics stats;
  stats.increments = {{1, 3}, {-1, 3}};
  stats.elapsed_time = 6.0;
  auto dd = cma_estimate(stats);
  CHECK(dd.drift == 0.0);
  CHECK(dd.diffusion == doctest::Approx(0.5));

  stats.increments = {{1, 100}};
  stats.elapsed_time = 50.0;
  dd = cma_estimate(stats);
  CHECK(dd.drift == doctest::Approx(2.0));
  CHECK(dd.diffusion == doctest::Approx(1.0));

  stats.elapsed_time = 0.0;
  CHECK_THROWS_AS(cma_estimate(stats), Error);
}

TEST_CASE("drift and diffusion from effective propensities") {
  auto dd = drift_diffusion_from_propensities(EffectivePropensitySet{{100, 1}, {100, -1}});
  CHECK(dd.drift == 0.0);
  CHECK(dd.diffusion == doctest::Approx(100.0));
  dd = drift_diffusion_from_propensities(EffectivePropensitySet{{100, 1}, {75, -1}});
  CHECK(dd.drift == doctest::Approx(25.0));
  CHECK(dd.diffusion == doctest::Approx(87.5));
  dd = drift_diffusion_from_propensities(EffectivePropensitySet{{3.5, 1}});
  CHECK(dd.drift == doctest::Approx(3.5));
  CHECK(dd.diffusion == doctest::Approx(1.75));
  CHECK_THROWS_AS(drift_diffusion_from_propensities(EffectivePropensitySet{}), Error);
}

TEST_CASE("diffusion bounds the largest single contribution") {
  for (int trial = 0; trial < 200; ++trial) {
    EffectivePropensitySet set;
    double largest = 0.0;
    bool any = false;
    for (int i = 0; i < 4; ++i) {
      const double a = (trial * 7 + i * 13) % 5 == 0 ? 0.0 : ((trial * 31 + i * 17) % 97) / 3.0;
      const Count nu = (i % 3) - 1 == 0 ? 2 : (i % 3) - 1;
      set.push_back({a, nu});
      largest = std::max(largest, 0.5 * a * double(nu * nu));
      any |= a > 0.0;
    }
    const auto dd = drift_diffusion_from_propensities(set);
    CHECK(dd.diffusion >= largest);
    CHECK((dd.diffusion == 0.0) == !any);
  }
}

TEST_CASE("QSSMA propensities for the linear system") {
  auto check = [](double s, double a2) {
    const auto set = qssma_linear_propensities(1.0, 1.0, 100.0, s);
    REQUIRE(set.size() == 2);
    CHECK(set[0].value == 100.0);
    CHECK(set[0].slow_change == 1);
    CHECK(set[1].value == a2);
    CHECK(set[1].slow_change == -1);
  };
  check(200.0, 100.0);
  check(0.0, 0.0);
  check(300.0, 150.0);
}

TEST_CASE("QSSMA closure for the dimerisation system") {
  const BistableParameters p;
  const auto q = qssma_bistable(p, 300.0);
  const double x1 = oracle::dimer_mean_x1(p.k5_per_volume, p.k6, 300.0);
  const double x2 = (300.0 - x1) / 2.0;
  CHECK(q.mean_x1 == doctest::Approx(164.575).epsilon(1e-5));
  CHECK(q.mean_x1 == doctest::Approx(x1).epsilon(1e-13));
  CHECK(q.mean_x2 == doctest::Approx(67.71).epsilon(1e-4));

  // Second effective propensity term by term.
  const double first = p.k2_per_volume * 300.0 * x2;
  const double second = -2.0 * p.k2_per_volume * x2 * x2;
  const double denom = 8.0 * p.k5_per_volume * x2 - 2.0 * p.k5_per_volume * (2.0 * 300.0 + 3.0) - p.k6;
  const double third = 2.0 * p.k2_per_volume * p.k6 * x2 / denom;
  REQUIRE(q.propensities.size() == 4);
  CHECK(q.propensities[1].value == doctest::Approx(first + second + third).epsilon(1e-12));
  CHECK(q.propensities[1].value == doctest::Approx(444.0).epsilon(2e-3));
  CHECK(q.correction == doctest::Approx(third).epsilon(1e-12));
  CHECK(q.propensities[0].value == doctest::Approx(p.k1 * x2));
  CHECK(q.propensities[2].value == 1475.0);
  CHECK(q.propensities[3].value == doctest::Approx(p.k4 * x1));
  const std::vector<Count> changes{1, -1, 1, -1};
  for (std::size_t i = 0; i < 4; ++i) CHECK(q.propensities[i].slow_change == changes[i]);

  const auto zero = qssma_bistable(p, 0.0);
  CHECK(zero.mean_x1 == 0.0);
  CHECK(zero.mean_x2 == 0.0);
  CHECK(zero.propensities[0].value == 0.0);
  CHECK(zero.propensities[1].value == 0.0);
  CHECK(zero.propensities[2].value == 1475.0);
  CHECK(zero.propensities[3].value == 0.0);
}

TEST_CASE("qssma_propensities dispatches on the network's closure") {
  CHECK(qssma_propensities(linear_system(), 200.0)[1].value == doctest::Approx(100.0));
  CHECK(qssma_propensities(bistable_system(), 300.0)[2].value == 1475.0);
  NetworkSpec none = linear_system();
  none.qssma = QssmaKind::none;
  CHECK_THROWS_AS(qssma_propensities(none, 200.0), Error);
}

TEST_CASE("NMA on the linear system") {
  const auto spec = linear_at(10.0);
  RandomStream rng(1, 200);
  const auto set = nma_estimate(spec.network, spec.projection, 200, 1'000'000, rng);
  REQUIRE(set.size() == 2);
  CHECK(set[0].value == 100.0);
  CHECK(set[1].value == doctest::Approx(100.0).epsilon(0.01));
  RandomStream again(1, 200);
  CHECK_THROWS_AS(nma_estimate(spec.network, spec.projection, 200, 0, again), Error);
}

TEST_CASE("NMA on the bistable system tracks the rate-equation closure") {
  const auto spec = bistable_system();
  for (auto closure : {NmaClosure::mean, NmaClosure::moments}) {
    RandomStream rng(2, 300);
    const auto set = nma_estimate(spec.network, spec.projection, 300, 1'000'000, rng, closure);
    REQUIRE(set.size() == 4);
    CHECK(set[3].value == doctest::Approx(19.75 * 164.575).epsilon(0.01));
    CHECK(set[2].value == doctest::Approx(1475.0).epsilon(1e-12));
  }
}

TEST_CASE("method and closure names round-trip") {
  for (auto m : {Method::cma, Method::nma, Method::qssma}) CHECK(parse_method(to_string(m)) == m);
  for (auto c : {NmaClosure::mean, NmaClosure::moments}) CHECK(parse_nma_closure(to_string(c)) == c);
  CHECK(parse_method("CMA") == Method::cma);
  CHECK_THROWS_AS(parse_method("ssa"), Error);
  CHECK_THROWS_AS(parse_nma_closure("median"), Error);
}

TEST_CASE("QSSMA table on the linear grid is exact and free") {
  const auto grid = integer_grid(101, 300);
  TableOptions opt;
  opt.method = Method::qssma;
  const auto table = build_table(linear_system(), grid, opt);
  REQUIRE(table.size() == 200);
  CHECK(table.complete());
  CHECK(table.total_cost() == 0);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double s = static_cast<double>(table.grid[i]);
    CHECK(table.drift[i] == 100.0 - s / 2.0);
    CHECK(table.diffusion[i] == (100.0 + s / 2.0) / 2.0);
    CHECK(table.stream_id[i] == i);
  }
  const auto again = build_table(linear_system(), grid, opt);
  CHECK(again.drift == table.drift);
}

TEST_CASE("CMA tables do not depend on the worker count") {
  const auto grid = integer_grid(101, 300);
  TableOptions opt;
  opt.method = Method::cma;
  opt.budget = 10'000;
  opt.seed = 7;
  const auto one = build_table(linear_system(), grid, opt);
  opt.workers = 4;
  const auto four = build_table(linear_system(), grid, opt);
  std::ostringstream a;
  std::ostringstream b;
  write_table_csv(a, one);
  write_table_csv(b, four);
  CHECK(a.str() == b.str());
  CHECK(one.complete());
  CHECK(one.total_cost() > 200u * 10'000u);
}

TEST_CASE("NMA table for the bistable system crosses zero at least twice") {
  std::vector<Count> grid;
  for (Count s = 20; s <= 1900; s += 20) grid.push_back(s);
  TableOptions opt;
  opt.method = Method::nma;
  opt.budget = 20'000;
  const auto nma = build_table(bistable_system(), grid, opt);
  opt.method = Method::qssma;
  const auto qssma = build_table(bistable_system(), grid, opt);
  CHECK(sign_changes(qssma.drift) >= 2);
  CHECK(sign_changes(nma.drift) >= 2);
}

TEST_CASE("failing points are recorded, not thrown") {
  ReactionNetwork death({"X"}, {{"d", {1}, {0}, 1.0}}, 1.0, {});
  NetworkSpec spec;
  spec.network = death;
  spec.projection = {{1}, 0, 3, 0};
  TableOptions opt;
  opt.method = Method::cma;
  opt.budget = 10;
  const auto table = build_table(spec, integer_grid(0, 3), opt);
  CHECK_FALSE(table.complete());
  CHECK(table.errors[0].find("absorbing_state") == 0);
  CHECK(std::isnan(table.drift[0]));
}

TEST_CASE("table options are validated") {
  TableOptions opt;
  opt.method = Method::cma;
  const std::vector<Count> grid{101, 102};
  CHECK_THROWS_AS(build_table(linear_system(), grid, opt), Error);
  opt.budget = 10;
  opt.workers = 0;
  CHECK_THROWS_AS(build_table(linear_system(), grid, opt), Error);
  opt.workers = 1;
  const std::vector<Count> unordered{102, 101};
  CHECK_THROWS_AS(build_table(linear_system(), unordered, opt), Error);
}

TEST_CASE("table CSV round trip") {
  TableOptions opt;
  opt.method = Method::cma;
  opt.budget = 200;
  opt.seed = 3;
  const auto table = build_table(linear_system(), integer_grid(150, 160), opt);
  const auto path = std::filesystem::temp_directory_path() / "mscale_table_roundtrip.csv";
  write_table_csv(path, table);
  const auto back = read_table_csv(path);
  CHECK(back.grid == table.grid);
  CHECK(back.drift == table.drift);
  CHECK(back.diffusion == table.diffusion);
  CHECK(back.cost == table.cost);
  CHECK(back.stream_id == table.stream_id);
  CHECK(back.method == Method::cma);
  CHECK(back.seed == 3);
  std::filesystem::remove(path);
}

TEST_CASE("CMA standard error shrinks like budget^-1/2") {
  const auto spec = linear_at(10.0);
  const std::vector<std::uint64_t> budgets{100, 1'000, 10'000, 100'000, 1'000'000};
  const int replicates = 16;
  std::vector<double> xs;
  std::vector<double> sds;
  for (auto n : budgets) {
    std::vector<double> v;
    for (int r = 0; r < replicates; ++r) {
      RandomStream rng(11, static_cast<std::uint64_t>(r));
      v.push_back(cma_estimate(run_cssa(spec.network, spec.projection, 200, StopRule::events(n), rng)).drift);
    }
    double m = 0.0;
    for (double x : v) m += x;
    m /= replicates;
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    xs.push_back(static_cast<double>(n));
    sds.push_back(std::sqrt(var / (replicates - 1)));
  }
  CHECK(oracle::ols_loglog_slope(xs, sds) == doctest::Approx(-0.5).epsilon(0.2));
}
