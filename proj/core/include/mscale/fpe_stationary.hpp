#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "mscale/distribution.hpp"
#include "mscale/estimators.hpp"

namespace mscale {

/// Density sampled on an ascending grid, normalized so the trapezoidal
/// integral over the grid is 1. p(s) = exp(log_normalization) / D(s) *
/// exp(integral of V/D from grid.front() to s).
struct ContinuousDensity {
  std::vector<double> grid;
  std::vector<double> values;
  double log_normalization = 0.0;

  /// Piecewise-cubic interpolant (in log p where p > 0), zero off the grid.
  double at(double s) const;
  double trapezoid_mass() const;
};

/// Stationary Fokker-Planck solution by the trapezoidal rule on the grid.
/// Throws Error(invalid_argument) naming the point if D <= 0 or not finite,
/// and when the grid has fewer than 3 points or is not increasing.
ContinuousDensity solve_stationary(std::span<const double> grid, std::span<const double> drift,
                                   std::span<const double> diffusion);
ContinuousDensity solve_stationary(const DriftDiffusionTable& table);

/// Stationary density of the diffusion approximation of the birth-death
/// process 0 <-> S with rates (lambda, s), truncated to s >= 0 and normalized.
/// Throws Error(invalid_argument) unless lambda > 0.
double birth_death_log_density(double lambda, double s);
double birth_death_density(double lambda, double s);

struct ProjectedPmf {
  DiscreteDistribution pmf;  // renormalized
  double raw_mass = 0.0;     // sum of the cell integrals before renormalizing
};

/// P(n) = integral of p over [n - 1/2, n + 1/2] clipped to the grid, by
/// composite Simpson with `refinement` panels per cell.
ProjectedPmf project_to_pmf(const ContinuousDensity& density, int refinement = 8);

/// Same cell integrals for a density given as a function, by adaptive
/// Gauss-Kronrod. Cells are clipped below at lower_edge.
ProjectedPmf project_density(const std::function<double(double)>& density, Count n_min,
                             Count n_max, double lower_edge = 0.0);

/// Closed-form cell masses of the birth-death density through the lower
/// incomplete gamma function. The n = 0 cell starts at s = 0.
double birth_death_pmf_analytic(double lambda, Count n);
DiscreteDistribution birth_death_pmf(double lambda, Count n_max);

/// Table -> density -> renormalized pmf.
DiscreteDistribution fpe_pmf(const DriftDiffusionTable& table, int refinement = 8);

/// Columns: s,p.
void write_density_csv(const std::filesystem::path& path, const ContinuousDensity& density);

}  // namespace mscale
