#include <random>

#include "doctest.h"
#include "mscale/error.hpp"
#include "mscale/reaction_model.hpp"
#include "mscale/systems.hpp"

using namespace mscale;

TEST_CASE("propensities follow mass action") {
  const auto bis = bistable_system().network;
  SUBCASE("zeroth order inflow ignores the state") {
    for (StateVector x : {StateVector{0, 0}, StateVector{7, 900}}) {
      CHECK(propensities(bis, x)[2] == doctest::Approx(1475.0));
    }
  }
  SUBCASE("dimerisation uses the falling factorial") {
    CHECK(propensities(bis, StateVector{5, 0})[4] == doctest::Approx(200.0));
    CHECK(propensities(bis, StateVector{1, 0})[4] == 0.0);
  }
  SUBCASE("empty species gives zero") {
    const auto lin = linear_system().network;
    CHECK(propensities(lin, StateVector{3, 0})[1] == 0.0);
  }
  SUBCASE("volume convention scales by V^(1 - order)") {
    ReactionNetwork net({"A", "B"},
                        {{"in", {0, 0}, {1, 0}, 2.0, RateConvention::volume},
                         {"pair", {1, 1}, {0, 0}, 3.0, RateConvention::volume},
                         {"dim", {2, 0}, {0, 1}, 3.0, RateConvention::volume}},
                        10.0, {});
    const auto a = propensities(net, StateVector{4, 5});
    CHECK(a[0] == doctest::Approx(20.0));
    CHECK(a[1] == doctest::Approx(3.0 * 4 * 5 / 10.0));
    CHECK(a[2] == doctest::Approx(3.0 * 4 * 3 / 10.0));
  }
  SUBCASE("wrong dimension") {
    CHECK_THROWS_AS(propensities(bis, StateVector{1, 2, 3}), Error);
  }
}

TEST_CASE("propensities are non-negative and vanish below reactant counts") {
  const auto bis = bistable_system().network;
  std::mt19937 gen(3);
  std::uniform_int_distribution<Count> pick(0, 4);
  for (int trial = 0; trial < 500; ++trial) {
    StateVector x{pick(gen), pick(gen)};
    const auto a = propensities(bis, x);
    for (std::size_t j = 0; j < a.size(); ++j) {
      CHECK(a[j] >= 0.0);
      const auto& r = bis.reaction(j);
      bool short_of = false;
      for (std::size_t i = 0; i < x.size(); ++i) short_of |= x[i] < r.reactants[i];
      if (short_of) CHECK(a[j] == 0.0);
    }
  }
}

TEST_CASE("incrementing a species only moves reactions that consume it") {
  const auto bis = bistable_system().network;
  const StateVector x{40, 17};
  const auto base = propensities(bis, x);
  for (std::size_t i = 0; i < 2; ++i) {
    StateVector y = x;
    ++y[i];
    const auto moved = propensities(bis, y);
    for (std::size_t j = 0; j < base.size(); ++j) {
      if (bis.reaction(j).reactants[i] == 0) CHECK(moved[j] == base[j]);
    }
  }
}

TEST_CASE("apply_reaction adds the net change and flags negativity") {
  const auto bis = bistable_system().network;
  const auto lin = linear_system().network;
  auto r = apply_reaction(StateVector{100, 100}, bis, 4);
  CHECK(r.state == StateVector{98, 101});
  CHECK_FALSE(r.negative);
  r = apply_reaction(StateVector{0, 5}, lin, 3);
  CHECK(r.state == StateVector{1, 4});
  r = apply_reaction(StateVector{0, 0}, lin, 1);
  CHECK(r.state == StateVector{0, -1});
  CHECK(r.negative);
}

TEST_CASE("slow_value") {
  SlowProjection lin{{1, 1}, 101, 300, 0};
  SlowProjection bis{{1, 2}, 0, 2000, 0};
  CHECK(slow_value(lin, StateVector{100, 110}) == 210);
  CHECK(slow_value(bis, StateVector{100, 100}) == 300);
  CHECK(slow_value(bis, StateVector{0, 0}) == 0);
}

TEST_CASE("fast reactions leave the slow value unchanged") {
  for (const auto& spec : {linear_system(), bistable_system()}) {
    std::mt19937 gen(11);
    std::uniform_int_distribution<Count> pick(0, 50);
    for (int trial = 0; trial < 100; ++trial) {
      StateVector x{pick(gen), pick(gen)};
      for (std::size_t j : spec.network.fast_set()) {
        const auto y = apply_reaction(x, spec.network, j).state;
        CHECK(slow_value(spec.projection, y) == slow_value(spec.projection, x));
      }
    }
  }
}

TEST_CASE("validate_network") {
  const auto lin = linear_system();
  const auto bis = bistable_system();
  CHECK(validate_network(lin.network, lin.projection).valid);
  CHECK(validate_network(bis.network, bis.projection).valid);

  SlowProjection wrong = bis.projection;
  wrong.coefficients = {1, 1};
  const auto report = validate_network(bis.network, wrong);
  CHECK_FALSE(report.valid);
  REQUIRE_FALSE(report.violations.empty());
  CHECK(report.to_string().find("R5") != std::string::npos);

  SlowProjection reversed = lin.projection;
  reversed.s_min = 10;
  reversed.s_max = 5;
  CHECK_FALSE(validate_network(lin.network, reversed).valid);

  SlowProjection bad_size = lin.projection;
  bad_size.coefficients = {1};
  CHECK_FALSE(validate_network(lin.network, bad_size).valid);
}

TEST_CASE("construction rejects malformed networks") {
  using R = Reaction;
  CHECK_THROWS_AS(ReactionNetwork({"A"}, {R{"r", {1}, {0}, -1.0}}, 1.0, {}), Error);
  CHECK_THROWS_AS(ReactionNetwork({"A"}, {R{"r", {1, 0}, {0}, 1.0}}, 1.0, {}), Error);
  CHECK_THROWS_AS(ReactionNetwork({"A"}, {R{"r", {1}, {0}, 1.0}}, 0.0, {}), Error);
  CHECK_THROWS_AS(ReactionNetwork({"A"}, {R{"r", {1}, {0}, 1.0}}, 1.0, {3}), Error);
  CHECK_THROWS_AS(ReactionNetwork({"A"}, {R{"r", {1}, {0}, 1.0}}, 1.0, {0, 0}), Error);
}

TEST_CASE("fast and slow sets partition the reactions") {
  const auto bis = bistable_system().network;
  CHECK(bis.fast_set() == std::vector<std::size_t>{4, 5});
  CHECK(bis.slow_set() == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(slow_change(bistable_system().projection, bis, 0) == 1);
  CHECK(slow_change(bistable_system().projection, bis, 1) == -1);
}

TEST_CASE("third order reactions fail validation") {
  ReactionNetwork net({"A"}, {{"tri", {3}, {0}, 1.0}}, 1.0, {});
  const auto report = validate_network(net, SlowProjection{{1}, 0, 10, 0});
  CHECK_FALSE(report.valid);
}
