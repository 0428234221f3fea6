#pragma once

#include "mscale/network_file.hpp"

namespace mscale {

/// Fast-slow linear system: 0 -> X1 (k1), X2 -> 0 (k2), X1 <-> X2 (K both ways).
struct LinearParameters {
  double k1 = 1.0;
  double k2 = 1.0;
  double volume = 100.0;
  double K = 10.0;
};

/// Bistable system with fast reversible dimerisation 2 X1 <-> X2. Values are
/// the combined propensity coefficients, e.g. k2_per_volume is k2/V.
struct BistableParameters {
  double k1 = 32.0;
  double k2_per_volume = 0.04;
  double k3_volume = 1475.0;
  double k4 = 19.75;
  double k5_per_volume = 10.0;
  double k6 = 4000.0;
};

/// S = X1 + X2, X1 absorbs resets, grid [101, 300], CME domain [0,600]^2.
NetworkSpec linear_system(const LinearParameters& p = {});

/// S = X1 + 2 X2, X1 absorbs resets, CME domain [0,1000] x [0,1500].
NetworkSpec bistable_system(const BistableParameters& p = {});

/// Reads the linear-system parameters back out of a network with the
/// linear_system() reaction layout. Throws Error(invalid_argument) otherwise.
LinearParameters linear_parameters_of(const ReactionNetwork& network);
BistableParameters bistable_parameters_of(const ReactionNetwork& network);

}  // namespace mscale
