#include "mscale/systems.hpp"

#include "mscale/error.hpp"

namespace mscale {

namespace {

Reaction make(std::string label, std::vector<int> in, std::vector<int> out, double rate,
              RateConvention convention = RateConvention::volume) {
  return Reaction{std::move(label), std::move(in), std::move(out), rate, convention};
}

bool same_shape(const Reaction& r, const std::vector<int>& in, const std::vector<int>& out) {
  return r.reactants == in && r.products == out;
}

}  // namespace

NetworkSpec linear_system(const LinearParameters& p) {
  NetworkSpec spec;
  spec.name = "linear";
  spec.parameters = {{"k1", p.k1}, {"k2", p.k2}, {"K", p.K}, {"V", p.volume}};
  spec.network = ReactionNetwork({"X1", "X2"},
                                 {make("R1", {0, 0}, {1, 0}, p.k1),
                                  make("R2", {0, 1}, {0, 0}, p.k2),
                                  make("R3", {1, 0}, {0, 1}, p.K),
                                  make("R4", {0, 1}, {1, 0}, p.K)},
                                 p.volume, {2, 3});
  spec.projection = SlowProjection{{1, 1}, 101, 300, 0};
  spec.initial_state = StateVector{100, 100};
  spec.domain = {600, 600};
  spec.qssma = QssmaKind::linear;
  return spec;
}

NetworkSpec bistable_system(const BistableParameters& p) {
  constexpr auto combined = RateConvention::combined;
  NetworkSpec spec;
  spec.name = "bistable";
  spec.parameters = {{"k1", p.k1},           {"k2_per_V", p.k2_per_volume},
                     {"k3_V", p.k3_volume},  {"k4", p.k4},
                     {"k5_per_V", p.k5_per_volume}, {"k6", p.k6}};
  spec.network = ReactionNetwork({"X1", "X2"},
                                 {make("R1", {0, 1}, {1, 1}, p.k1),
                                  make("R2", {1, 1}, {0, 1}, p.k2_per_volume, combined),
                                  make("R3", {0, 0}, {1, 0}, p.k3_volume, combined),
                                  make("R4", {1, 0}, {0, 0}, p.k4),
                                  make("R5", {2, 0}, {0, 1}, p.k5_per_volume, combined),
                                  make("R6", {0, 1}, {2, 0}, p.k6)},
                                 1.0, {4, 5});
  spec.projection = SlowProjection{{1, 2}, 0, 2000, 0};
  spec.initial_state = StateVector{100, 100};
  spec.domain = {1000, 1500};
  spec.qssma = QssmaKind::dimerisation;
  return spec;
}

LinearParameters linear_parameters_of(const ReactionNetwork& network) {
  if (network.species_count() != 2 || network.reaction_count() != 4 ||
      !same_shape(network.reaction(0), {0, 0}, {1, 0}) ||
      !same_shape(network.reaction(1), {0, 1}, {0, 0}) ||
      !same_shape(network.reaction(2), {1, 0}, {0, 1}) ||
      !same_shape(network.reaction(3), {0, 1}, {1, 0})) {
    throw Error(ErrorCode::invalid_argument,
                "network does not have the linear fast-slow reaction layout");
  }
  LinearParameters p;
  p.volume = network.volume();
  p.k1 = network.coefficient(0) / network.volume();
  p.k2 = network.coefficient(1);
  p.K = network.coefficient(2);
  return p;
}

BistableParameters bistable_parameters_of(const ReactionNetwork& network) {
  if (network.species_count() != 2 || network.reaction_count() != 6 ||
      !same_shape(network.reaction(0), {0, 1}, {1, 1}) ||
      !same_shape(network.reaction(1), {1, 1}, {0, 1}) ||
      !same_shape(network.reaction(2), {0, 0}, {1, 0}) ||
      !same_shape(network.reaction(3), {1, 0}, {0, 0}) ||
      !same_shape(network.reaction(4), {2, 0}, {0, 1}) ||
      !same_shape(network.reaction(5), {0, 1}, {2, 0})) {
    throw Error(ErrorCode::invalid_argument,
                "network does not have the dimerisation reaction layout");
  }
  BistableParameters p;
  p.k1 = network.coefficient(0);
  p.k2_per_volume = network.coefficient(1);
  p.k3_volume = network.coefficient(2);
  p.k4 = network.coefficient(3);
  p.k5_per_volume = network.coefficient(4);
  p.k6 = network.coefficient(5);
  return p;
}

}  // namespace mscale
