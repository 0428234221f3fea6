#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mscale/constrained.hpp"
#include "mscale/network_file.hpp"
#include "mscale/systems.hpp"

namespace mscale {

/// Effective propensity of one slow reaction together with its change in S.
struct EffectivePropensity {
  double value = 0.0;
  Count slow_change = 0;
};
using EffectivePropensitySet = std::vector<EffectivePropensity>;

struct DriftDiffusion {
  double drift = 0.0;
  double diffusion = 0.0;
};

/// V = sum(dS) / T, D = sum(dS^2) / (2T). Throws Error(invalid_argument) when
/// no time has elapsed.
DriftDiffusion cma_estimate(const JumpStatistics& stats);

/// V = sum(a_i nu_i), D = sum(a_i nu_i^2) / 2. Throws on an empty set.
DriftDiffusion drift_diffusion_from_propensities(std::span<const EffectivePropensity> props);

/// How NMA turns fast-subsystem statistics into slow propensities.
///   mean:    slow propensities evaluated at the time-averaged fast state
///   moments: time-averaged slow propensities (exact fast-state moments)
enum class NmaClosure { mean, moments };

std::string_view to_string(NmaClosure closure);
NmaClosure parse_nma_closure(std::string_view text);

EffectivePropensitySet nma_propensities(const ReactionNetwork& network,
                                        const SlowProjection& projection,
                                        const FastAverages& averages, NmaClosure closure);

/// Runs the fast subsystem at s for n_fast events and applies the closure.
EffectivePropensitySet nma_estimate(const ReactionNetwork& network,
                                    const SlowProjection& projection, Count s,
                                    std::uint64_t n_fast, RandomStream& rng,
                                    NmaClosure closure = NmaClosure::mean,
                                    const ConstrainedOptions& options = {});

/// {(k1 V, +1), (k2 s / 2, -1)}.
EffectivePropensitySet qssma_linear_propensities(double k1, double k2, double volume, double s);

struct BistableQssma {
  double mean_x1 = 0.0;
  double mean_x2 = 0.0;
  /// Third term of the second effective propensity and its share of that
  /// propensity's magnitude, kept for diagnostics.
  double correction = 0.0;
  double correction_share = 0.0;
  EffectivePropensitySet propensities;  // R1..R4, changes (+1, -1, +1, -1)
};

/// Reaction-rate closure of the dimerisation fast subsystem. Throws
/// Error(singular_system) naming s when the correction denominator vanishes.
BistableQssma qssma_bistable(const BistableParameters& p, double s);
EffectivePropensitySet qssma_bistable_propensities(const BistableParameters& p, double s);

/// Closed-form QSSMA effective propensities for a network spec, selected by
/// spec.qssma. Throws Error(invalid_argument) when no closure is available.
EffectivePropensitySet qssma_propensities(const NetworkSpec& spec, double s);

enum class Method { cma, nma, qssma };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

struct DriftDiffusionTable {
  Method method = Method::qssma;
  std::uint64_t seed = 0;
  std::uint64_t budget = 0;
  std::vector<Count> grid;
  std::vector<double> drift;
  std::vector<double> diffusion;
  std::vector<std::uint64_t> cost;       // simulated reactions per point
  std::vector<std::uint64_t> stream_id;
  std::vector<std::string> errors;       // empty string when the point succeeded

  std::size_t size() const { return grid.size(); }
  bool complete() const;
  std::uint64_t total_cost() const;
};

struct TableOptions {
  Method method = Method::qssma;
  /// Recorded slow events per point (CMA) or fast events per point (NMA).
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  NmaClosure closure = NmaClosure::mean;
  ConstrainedOptions constrained;
  /// Point i uses stream_id = stream_offset + i (replicates use disjoint offsets).
  std::uint64_t stream_offset = 0;
};

/// Evaluates the estimator at every grid point on its own random stream.
/// Point failures are stored in `errors` instead of being thrown. The result
/// does not depend on the worker count.
DriftDiffusionTable build_table(const NetworkSpec& spec, std::span<const Count> grid,
                                const TableOptions& options);

/// Convenience grid s_min..s_max.
std::vector<Count> integer_grid(Count s_min, Count s_max);

/// Columns: s,V,D,cost,method,seed,stream_id. Failed points carry nan.
void write_table_csv(std::ostream& out, const DriftDiffusionTable& table);
void write_table_csv(const std::filesystem::path& path, const DriftDiffusionTable& table);
DriftDiffusionTable read_table_csv(const std::filesystem::path& path);

/// Worker count from MSCALE_WORKERS, else 1.
unsigned default_workers();

}  // namespace mscale
