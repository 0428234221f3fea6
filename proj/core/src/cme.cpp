#include "mscale/cme.hpp"

#include <algorithm>
#include <cmath>

#include "compiled_network.hpp"
#include "mscale/csv.hpp"
#include "mscale/error.hpp"

namespace mscale {

double poisson_pmf(double lambda, Count n) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::invalid_argument, "Poisson intensity must be positive");
  if (n < 0) return 0.0;
  const auto x = static_cast<double>(n);
  return std::exp(x * std::log(lambda) - lambda - std::lgamma(x + 1.0));
}

DiscreteDistribution poisson_distribution(double lambda, Count first, Count last) {
  if (first > last) throw Error(ErrorCode::invalid_argument, "empty Poisson support");
  DiscreteDistribution d;
  d.first = first;
  for (Count n = first; n <= last; ++n) d.masses.push_back(poisson_pmf(lambda, n));
  return d;
}

DiscreteDistribution poisson_distribution(double lambda) {
  const auto last = static_cast<Count>(std::ceil(lambda + 12.0 * std::sqrt(lambda) + 30.0));
  return poisson_distribution(lambda, 0, last);
}

namespace {

void check_positive(std::initializer_list<double> values) {
  for (double v : values) {
    if (!(v > 0.0)) throw Error(ErrorCode::invalid_argument, "rate parameters must be positive");
  }
}

}  // namespace

PoissonLaw linear_exact_slow_distribution(double k1, double k2, double volume, double K) {
  check_positive({k1, k2, volume, K});
  return {k1 * volume / k2 * (2.0 + k2 / K)};
}

PoissonLaw linear_qssa_slow_distribution(double k1, double k2, double volume) {
  check_positive({k1, k2, volume});
  return {2.0 * k1 * volume / k2};
}

LinearJointIntensities linear_joint_intensities(double k1, double k2, double volume, double K) {
  check_positive({k1, k2, volume, K});
  const double l1 = k1 * volume / k2;
  return {l1, l1 * (K + k2) / K};
}

double exact_joint_pmf_linear(double k1, double k2, double volume, double K, Count x1, Count x2) {
  const auto l = linear_joint_intensities(k1, k2, volume, K);
  return poisson_pmf(l.lambda2, x1) * poisson_pmf(l.lambda1, x2);
}

TruncatedDomain::TruncatedDomain(std::vector<Count> upper_bounds) : bounds_(std::move(upper_bounds)) {
  if (bounds_.empty()) throw Error(ErrorCode::domain_too_small, "domain has no dimensions");
  for (Count b : bounds_) {
    if (b <= 0) throw Error(ErrorCode::domain_too_small, "domain bounds must be positive");
  }
  strides_.assign(bounds_.size(), 1);
  size_ = 1;
  for (std::size_t i = bounds_.size(); i-- > 0;) {
    strides_[i] = size_;
    size_ *= static_cast<std::size_t>(bounds_[i] + 1);
  }
}

bool TruncatedDomain::contains(std::span<const Count> x) const {
  if (x.size() != bounds_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || x[i] > bounds_[i]) return false;
  }
  return true;
}

std::size_t TruncatedDomain::index(std::span<const Count> x) const {
  if (!contains(x)) throw Error(ErrorCode::invalid_argument, "state outside the truncated domain");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) idx += static_cast<std::size_t>(x[i]) * strides_[i];
  return idx;
}

StateVector TruncatedDomain::state(std::size_t index) const {
  StateVector x(bounds_.size());
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    x[i] = static_cast<Count>(index / strides_[i]);
    index %= strides_[i];
  }
  return x;
}

SparseGenerator build_generator(const ReactionNetwork& network, const TruncatedDomain& domain) {
  if (domain.dimension() != network.species_count()) {
    throw Error(ErrorCode::dimension_mismatch, "domain dimension does not match the network");
  }
  const auto all = detail::all_reactions(network);
  const detail::CompiledNetwork net(network, all);
  const std::size_t n = domain.size();
  const std::size_t m = net.size();
  const std::size_t d = domain.dimension();
  const auto& bounds = domain.upper_bounds();

  // Index offset of every reaction's jump, valid whenever the target is inside.
  std::vector<std::ptrdiff_t> offset(m, 0);
  {
    std::vector<std::ptrdiff_t> strides(d);
    std::ptrdiff_t s = 1;
    for (std::size_t i = d; i-- > 0;) {
      strides[i] = s;
      s *= static_cast<std::ptrdiff_t>(bounds[i] + 1);
    }
    for (std::size_t k = 0; k < m; ++k) {
      for (const auto& c : net.changes(k)) offset[k] += c.delta * strides[c.species];
    }
  }

  SparseGenerator gen;
  gen.domain = domain;
  gen.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  gen.matrix.reserve(Eigen::VectorXi::Constant(static_cast<Eigen::Index>(n), static_cast<int>(m + 1)));

  StateVector x(d, 0);
  std::vector<std::pair<std::size_t, double>> column;
  std::size_t transitions = 0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    column.clear();
    double out = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double a = net.propensity(k, x.data());
      if (a <= 0.0) continue;
      bool inside = true;
      for (const auto& c : net.changes(k)) {
        const Count v = x[c.species] + c.delta;
        inside &= v >= 0 && v <= bounds[c.species];
      }
      if (!inside) continue;
      const auto target = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) + offset[k]);
      column.emplace_back(target, a);
      out += a;
    }
    transitions += column.size();
    column.emplace_back(idx, -out);
    std::sort(column.begin(), column.end());
    // Reactions with the same jump share one entry.
    for (std::size_t i = 0; i < column.size();) {
      double rate = 0.0;
      std::size_t j = i;
      for (; j < column.size() && column[j].first == column[i].first; ++j) rate += column[j].second;
      gen.matrix.insert(static_cast<Eigen::Index>(column[i].first), static_cast<Eigen::Index>(idx)) = rate;
      i = j;
    }
    gen.max_exit_rate = std::max(gen.max_exit_rate, out);
    // Advance x in row-major order.
    for (std::size_t i = d; i-- > 0;) {
      if (++x[i] <= bounds[i]) break;
      x[i] = 0;
    }
  }
  gen.matrix.makeCompressed();
  if (transitions == 0) {
    throw Error(ErrorCode::domain_too_small, "no transition stays inside the truncated domain");
  }
  for (Eigen::Index j = 0; j < gen.matrix.outerSize(); ++j) {
    double sum = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(gen.matrix, j); it; ++it) sum += it.value();
    gen.max_column_sum = std::max(gen.max_column_sum, std::abs(sum));
  }
  return gen;
}

DiscreteDistribution marginalize_slow(const TruncatedDomain& domain, std::span<const double> p,
                                      const SlowProjection& projection) {
  if (p.size() != domain.size() || projection.coefficients.size() != domain.dimension()) {
    throw Error(ErrorCode::dimension_mismatch, "lattice vector does not match the domain");
  }
  Count lo = 0;
  Count hi = 0;
  for (std::size_t i = 0; i < domain.dimension(); ++i) {
    const Count c = projection.coefficients[i] * domain.upper_bounds()[i];
    (c < 0 ? lo : hi) += c;
  }
  DiscreteDistribution out;
  out.first = lo;
  out.masses.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
  const std::size_t d = domain.dimension();
  StateVector x(d, 0);
  for (std::size_t idx = 0; idx < p.size(); ++idx) {
    out.masses[static_cast<std::size_t>(slow_value(projection, x) - lo)] += p[idx];
    for (std::size_t i = d; i-- > 0;) {
      if (++x[i] <= domain.upper_bounds()[i]) break;
      x[i] = 0;
    }
  }
  return out;
}

void write_lattice_csv(const std::filesystem::path& path, const TruncatedDomain& domain,
                       std::span<const double> p, double threshold) {
  auto out = open_output(path);
  for (std::size_t i = 0; i < domain.dimension(); ++i) out << 'x' << i + 1 << ',';
  out << "p\n";
  for (std::size_t idx = 0; idx < p.size(); ++idx) {
    if (p[idx] <= threshold) continue;
    for (Count v : domain.state(idx)) out << v << ',';
    out << format_double(p[idx]) << '\n';
  }
}

}  // namespace mscale
