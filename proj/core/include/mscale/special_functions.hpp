#pragma once

namespace mscale {

/// Regularized lower incomplete gamma P(k, x) = gamma(k, x) / Gamma(k).
/// Throws Error(invalid_argument) unless k > 0 and x >= 0 (x may be +inf).
double regularized_gamma_p(double k, double x);
/// Q(k, x) = 1 - P(k, x), accurate in the upper tail.
double regularized_gamma_q(double k, double x);

/// gamma(k, x) itself. Overflows to +inf for large k; use the log form there.
double lower_incomplete_gamma(double k, double x);
/// log gamma(k, x); -inf at x = 0.
double log_lower_incomplete_gamma(double k, double x);

}  // namespace mscale
