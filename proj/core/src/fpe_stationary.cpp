#include "mscale/fpe_stationary.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "mscale/csv.hpp"
#include "mscale/error.hpp"
#include "mscale/special_functions.hpp"

namespace mscale {

namespace {

double cubic_hermite(double y0, double y1, double m0, double m1, double h, double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * m1;
}

}  // namespace

double ContinuousDensity::at(double s) const {
  const std::size_t n = grid.size();
  if (n == 0 || s < grid.front() || s > grid.back()) return 0.0;
  if (n == 1) return values[0];
  std::size_t i = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), s) - grid.begin());
  i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
  const double h = grid[i + 1] - grid[i];
  const double t = (s - grid[i]) / h;
  const std::size_t lo = i == 0 ? 0 : i - 1;
  const std::size_t hi = std::min(i + 2, n - 1);
  bool positive = true;
  for (std::size_t k = lo; k <= hi; ++k) positive &= values[k] > 0.0;
  if (!positive) return (1.0 - t) * values[i] + t * values[i + 1];

  auto y = [this](std::size_t k) { return std::log(values[k]); };
  auto slope = [&](std::size_t k) {
    const std::size_t a = k == 0 ? 0 : k - 1;
    const std::size_t b = std::min(k + 1, n - 1);
    return (y(b) - y(a)) / (grid[b] - grid[a]);
  };
  return std::exp(cubic_hermite(y(i), y(i + 1), slope(i), slope(i + 1), h, t));
}

double ContinuousDensity::trapezoid_mass() const {
  double mass = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    mass += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
  }
  return mass;
}

ContinuousDensity solve_stationary(std::span<const double> grid, std::span<const double> drift,
                                   std::span<const double> diffusion) {
  const std::size_t n = grid.size();
  if (drift.size() != n || diffusion.size() != n) {
    throw Error(ErrorCode::dimension_mismatch, "grid, drift and diffusion lengths differ");
  }
  if (n < 3) throw Error(ErrorCode::invalid_argument, "stationary solve needs at least 3 grid points");
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw Error(ErrorCode::invalid_argument, "grid must be strictly increasing");
    }
    if (!(diffusion[i] > 0.0) || !std::isfinite(diffusion[i]) || !std::isfinite(drift[i])) {
      throw Error(ErrorCode::invalid_argument,
                  "diffusion must be positive and finite, violated at s = " + format_double(grid[i]));
    }
  }
  // log p_i = integral(V/D) - log D_i, shifted by its maximum before exp.
  std::vector<double> log_p(n);
  double integral = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      integral += 0.5 * (drift[i] / diffusion[i] + drift[i - 1] / diffusion[i - 1]) *
                  (grid[i] - grid[i - 1]);
    }
    log_p[i] = integral - std::log(diffusion[i]);
  }
  const double shift = *std::max_element(log_p.begin(), log_p.end());
  ContinuousDensity out;
  out.grid.assign(grid.begin(), grid.end());
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = std::exp(log_p[i] - shift);
  const double mass = out.trapezoid_mass();
  for (double& v : out.values) v /= mass;
  out.log_normalization = -shift - std::log(mass);
  return out;
}

ContinuousDensity solve_stationary(const DriftDiffusionTable& table) {
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!table.errors[i].empty()) {
      throw Error(ErrorCode::invalid_argument, "table point s = " + std::to_string(table.grid[i]) +
                                                   " failed: " + table.errors[i]);
    }
  }
  std::vector<double> grid(table.grid.begin(), table.grid.end());
  return solve_stationary(grid, table.drift, table.diffusion);
}

double birth_death_log_density(double lambda, double s) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::invalid_argument, "lambda must be positive");
  if (s < 0.0) return -INFINITY;
  const double k = 4.0 * lambda;
  // Normalizer: e^{2 lambda} 2^{-4 lambda} Gamma(4 lambda) Q(4 lambda, 2 lambda).
  const double log_z = 2.0 * lambda - k * std::log(2.0) + std::lgamma(k) +
                       std::log(regularized_gamma_q(k, 2.0 * lambda));
  return -2.0 * s + (k - 1.0) * std::log(s + lambda) - log_z;
}

double birth_death_density(double lambda, double s) {
  return std::exp(birth_death_log_density(lambda, s));
}

ProjectedPmf project_to_pmf(const ContinuousDensity& density, int refinement) {
  if (refinement < 2 || refinement % 2 != 0) {
    throw Error(ErrorCode::invalid_argument, "refinement must be a positive even number");
  }
  if (density.grid.size() < 2) throw Error(ErrorCode::invalid_argument, "density grid too short");
  const double g0 = density.grid.front();
  const double g1 = density.grid.back();
  const auto n_min = static_cast<Count>(std::floor(g0 - 0.5)) + 1;
  const auto n_max = static_cast<Count>(std::ceil(g1 + 0.5)) - 1;

  ProjectedPmf out;
  out.pmf.first = n_min;
  for (Count n = n_min; n <= n_max; ++n) {
    const double a = std::max(static_cast<double>(n) - 0.5, g0);
    const double b = std::min(static_cast<double>(n) + 0.5, g1);
    double mass = 0.0;
    if (b > a) {
      const double h = (b - a) / refinement;
      double sum = density.at(a) + density.at(b);
      for (int k = 1; k < refinement; ++k) sum += (k % 2 ? 4.0 : 2.0) * density.at(a + k * h);
      mass = sum * h / 3.0;
    }
    out.pmf.masses.push_back(mass);
  }
  out.raw_mass = out.pmf.total();
  out.pmf.normalize();
  return out;
}

ProjectedPmf project_density(const std::function<double(double)>& density, Count n_min,
                             Count n_max, double lower_edge) {
  if (n_min > n_max) throw Error(ErrorCode::invalid_argument, "empty projection range");
  using boost::math::quadrature::gauss_kronrod;
  ProjectedPmf out;
  out.pmf.first = n_min;
  for (Count n = n_min; n <= n_max; ++n) {
    const double a = std::max(static_cast<double>(n) - 0.5, lower_edge);
    const double b = static_cast<double>(n) + 0.5;
    const double mass = b > a ? gauss_kronrod<double, 31>::integrate(density, a, b, 10, 1e-11) : 0.0;
    out.pmf.masses.push_back(mass);
  }
  out.raw_mass = out.pmf.total();
  out.pmf.normalize();
  return out;
}

double birth_death_pmf_analytic(double lambda, Count n) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::invalid_argument, "lambda must be positive");
  if (n < 0) return 0.0;
  const double k = 4.0 * lambda;
  const double lo = std::max(2.0 * static_cast<double>(n) - 1.0, 0.0) + 2.0 * lambda;
  const double hi = 2.0 * static_cast<double>(n) + 1.0 + 2.0 * lambda;
  const double norm = regularized_gamma_q(k, 2.0 * lambda);
  // Difference of P below the median, of Q above it, to keep the tails accurate.
  if (regularized_gamma_p(k, lo) < 0.5) {
    return (regularized_gamma_p(k, hi) - regularized_gamma_p(k, lo)) / norm;
  }
  return (regularized_gamma_q(k, lo) - regularized_gamma_q(k, hi)) / norm;
}

DiscreteDistribution birth_death_pmf(double lambda, Count n_max) {
  DiscreteDistribution pmf;
  pmf.first = 0;
  for (Count n = 0; n <= n_max; ++n) pmf.masses.push_back(birth_death_pmf_analytic(lambda, n));
  return pmf;
}

DiscreteDistribution fpe_pmf(const DriftDiffusionTable& table, int refinement) {
  return project_to_pmf(solve_stationary(table), refinement).pmf;
}

void write_density_csv(const std::filesystem::path& path, const ContinuousDensity& density) {
  auto out = open_output(path);
  out << "s,p\n";
  for (std::size_t i = 0; i < density.grid.size(); ++i) {
    out << format_double(density.grid[i]) << ',' << format_double(density.values[i]) << '\n';
  }
}

}  // namespace mscale
