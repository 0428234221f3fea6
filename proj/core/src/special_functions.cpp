#include "mscale/special_functions.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "mscale/error.hpp"

namespace mscale {

namespace {

void check_domain(double k, double x) {
  if (!(k > 0.0) || !std::isfinite(k) || !(x >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "incomplete gamma needs k > 0 and x >= 0");
  }
}

}  // namespace

double regularized_gamma_p(double k, double x) {
  check_domain(k, x);
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(k, x);
}

double regularized_gamma_q(double k, double x) {
  check_domain(k, x);
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(k, x);
}

double lower_incomplete_gamma(double k, double x) {
  check_domain(k, x);
  if (std::isinf(x)) return std::tgamma(k);
  return boost::math::tgamma_lower(k, x);
}

double log_lower_incomplete_gamma(double k, double x) {
  check_domain(k, x);
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(regularized_gamma_p(k, x)) + std::lgamma(k);
}

}  // namespace mscale
