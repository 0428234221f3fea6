#pragma once

// Reference values computed independently of the library: Boost.Math for the
// special functions and quadrature, dense Eigen for small generators, and
// closed forms worked out by hand for the constrained linear chain.

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <vector>

namespace oracle {

double poisson(double lambda, std::int64_t n);

/// Unnormalized log of exp(-2s) (s + lambda)^(4 lambda - 1).
double birth_death_log_kernel(double lambda, double s);
/// Normalizing integral of the kernel over [0, inf), in log form.
double birth_death_log_norm(double lambda);
/// Density integral over [a, b] by adaptive Gauss-Kronrod on the kernel.
double birth_death_cell(double lambda, double a, double b);

/// gamma(k, x) by tanh-sinh quadrature of z^(k-1) e^(-z) scaled at its peak.
double lower_gamma_by_quadrature(double k, double x);
double log_lower_gamma_by_quadrature(double k, double x);

/// Mean of X2 in the constrained linear chain at slow value s: X2 ->
/// X1 at rate (K + k2) x2 and X1 -> X2 at rate K (s - x2).
double constrained_linear_mean_x2(double k2, double K, std::int64_t s);
struct Moments {
  double drift = 0.0;
  double diffusion = 0.0;
};
Moments constrained_linear(double k1, double k2, double volume, double K, std::int64_t s);

/// Stationary vector of a dense generator (columns sum to zero).
Eigen::VectorXd dense_stationary(const Eigen::MatrixXd& Q);

/// ||p - q|| / ||q|| for maps from integer to mass.
double relative_l2(const std::map<std::int64_t, double>& p, const std::map<std::int64_t, double>& q);

/// Ordinary least-squares slope of log y on log x.
double ols_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Positive root of the dimerisation rate equations: k5/V x1^2 = k6 x2,
/// x1 + 2 x2 = s.
double dimer_mean_x1(double k5_per_volume, double k6, double s);

}  // namespace oracle
