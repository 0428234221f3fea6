#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mscale/distribution.hpp"
#include "mscale/estimators.hpp"

namespace mscale {

/// ||p - q||_2 / ||q||_2 over the union of supports, q being the reference.
/// Throws Error(invalid_argument) if q has zero norm.
double relative_l2_error(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// Least-squares slope of log y against log x over points with
/// window_lo <= x <= window_hi. Throws Error(invalid_argument) on
/// non-positive data inside the window or fewer than 3 points.
double loglog_slope(std::span<const double> xs, std::span<const double> ys,
                    double window_lo = 0.0, double window_hi = INFINITY);

struct ErrorRecord {
  std::string method;
  std::uint64_t budget = 0;
  double error = 0.0;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
};

/// Total simulated reactions per method tag over a set of tables.
std::map<std::string, std::uint64_t> cost_tally(std::span<const DriftDiffusionTable> tables);

/// Columns: method,budget,error,seed,wall_ms.
void write_error_records(const std::filesystem::path& path, std::span<const ErrorRecord> records,
                         bool append = false);

}  // namespace mscale
