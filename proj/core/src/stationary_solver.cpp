// Stationary vector of a truncated CME generator: direct sparse LU for small
// lattices, otherwise iterative aggregation/disaggregation with the slow
// variable levels as aggregates and block Gauss-Seidel smoothing.

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "mscale/cme.hpp"
#include "mscale/error.hpp"

namespace mscale {

namespace {

using ColMatrix = Eigen::SparseMatrix<double>;
using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using LU = Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>>;

constexpr double negligible_mass = 1e-280;

/// Iterative Tarjan; returns the component id of every vertex.
std::vector<std::size_t> strongly_connected(const ColMatrix& q, std::size_t& components) {
  const auto n = static_cast<std::size_t>(q.cols());
  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  struct Frame {
    std::size_t v;
    Eigen::Index pos;
  };
  std::vector<Frame> calls;
  const auto* outer = q.outerIndexPtr();
  const auto* inner = q.innerIndexPtr();
  const auto* values = q.valuePtr();
  std::size_t counter = 0;
  components = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    calls.push_back({root, outer[root]});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!calls.empty()) {
      Frame& f = calls.back();
      const std::size_t v = f.v;
      bool descended = false;
      while (f.pos < outer[v + 1]) {
        const auto w = static_cast<std::size_t>(inner[f.pos]);
        const double rate = values[f.pos];
        ++f.pos;
        if (w == v || !(rate > 0.0)) continue;
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          calls.push_back({w, outer[w]});
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = components;
        } while (w != v);
        ++components;
      }
      calls.pop_back();
      if (!calls.empty()) {
        const std::size_t parent = calls.back().v;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return comp;
}

double scaled_residual(const RowMatrix& q, const std::vector<double>& p, double scale) {
  double r2 = 0.0;
  double p2 = 0.0;
  for (Eigen::Index i = 0; i < q.outerSize(); ++i) {
    double r = 0.0;
    for (RowMatrix::InnerIterator it(q, i); it; ++it) r += it.value() * p[static_cast<std::size_t>(it.col())];
    r2 += r * r;
    p2 += p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i)];
  }
  return std::sqrt(r2) / (scale * std::sqrt(p2));
}

void clean_and_normalize(std::vector<double>& p) {
  double total = 0.0;
  for (double& v : p) {
    if (!(v > negligible_mass)) v = 0.0;
    total += v;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::singular_system, "stationary iterate lost all mass");
  for (double& v : p) v /= total;
}

StationaryResult solve_direct(const SparseGenerator& gen) {
  const ColMatrix& q = gen.matrix;
  const Eigen::Index n = q.rows();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(q.nonZeros() + n));
  for (Eigen::Index j = 0; j < q.outerSize(); ++j) {
    for (ColMatrix::InnerIterator it(q, j); it; ++it) {
      if (it.row() != 0) entries.emplace_back(it.row(), j, it.value());
    }
    entries.emplace_back(0, j, 1.0);
  }
  ColMatrix a(n, n);
  a.setFromTriplets(entries.begin(), entries.end());
  LU lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorCode::singular_system, "sparse LU of the augmented generator failed");
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b[0] = 1.0;
  Eigen::VectorXd x = lu.solve(b);
  StationaryResult out;
  out.p.assign(x.data(), x.data() + n);
  clean_and_normalize(out.p);
  const RowMatrix rows = q;
  out.residual = scaled_residual(rows, out.p, std::max(gen.max_exit_rate, 1e-300));
  return out;
}

struct BlockFailure {};

StationaryResult solve_aggregation(const SparseGenerator& gen, const SlowProjection& projection,
                                   const StationaryOptions& options) {
  const TruncatedDomain& domain = gen.domain;
  if (projection.coefficients.size() != domain.dimension()) {
    throw Error(ErrorCode::dimension_mismatch, "aggregation projection does not match the domain");
  }
  const std::size_t n = domain.size();

  // Slow value of every lattice state, compacted to consecutive level ids.
  std::vector<Count> slow(n);
  {
    StateVector x(domain.dimension(), 0);
    for (std::size_t idx = 0; idx < n; ++idx) {
      slow[idx] = slow_value(projection, x);
      for (std::size_t i = x.size(); i-- > 0;) {
        if (++x[i] <= domain.upper_bounds()[i]) break;
        x[i] = 0;
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&slow](std::size_t a, std::size_t b) { return slow[a] < slow[b]; });
  std::vector<std::size_t> start{0};
  std::vector<std::size_t> level(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (r > 0 && slow[order[r]] != slow[order[r - 1]]) start.push_back(r);
    level[r] = start.size() - 1;
  }
  start.push_back(n);
  const std::size_t levels = start.size() - 1;

  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm(static_cast<int>(n));
  for (std::size_t r = 0; r < n; ++r) perm.indices()[static_cast<Eigen::Index>(order[r])] = static_cast<int>(r);
  RowMatrix q;
  {
    ColMatrix permuted = perm * gen.matrix * perm.transpose();
    q = permuted;
  }
  q.makeCompressed();
  const double scale = std::max(gen.max_exit_rate, 1e-300);

  // Diagonal blocks (one per level), factorized once.
  std::vector<LU> blocks(levels);
  std::size_t band = 0;
  for (std::size_t l = 0; l < levels; ++l) {
    const auto a = static_cast<Eigen::Index>(start[l]);
    const auto size = static_cast<Eigen::Index>(start[l + 1] - start[l]);
    std::vector<Eigen::Triplet<double>> entries;
    for (Eigen::Index i = a; i < a + size; ++i) {
      for (RowMatrix::InnerIterator it(q, i); it; ++it) {
        const auto lj = level[static_cast<std::size_t>(it.col())];
        band = std::max(band, lj > l ? lj - l : l - lj);
        if (lj == l) entries.emplace_back(i - a, it.col() - a, it.value());
      }
    }
    ColMatrix block(size, size);
    block.setFromTriplets(entries.begin(), entries.end());
    blocks[l].compute(block);
    if (blocks[l].info() != Eigen::Success) throw BlockFailure{};
  }

  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  std::vector<double> mass(levels), weight(n), xi(levels);
  const std::size_t width = 2 * band + 1;
  std::vector<double> coarse(levels * width);
  Eigen::VectorXd rhs, sol;

  auto smooth_level = [&](std::size_t l) {
    const auto a = static_cast<Eigen::Index>(start[l]);
    const auto b = static_cast<Eigen::Index>(start[l + 1]);
    rhs.resize(b - a);
    for (Eigen::Index i = a; i < b; ++i) {
      double r = 0.0;
      for (RowMatrix::InnerIterator it(q, i); it; ++it) {
        if (it.col() < a || it.col() >= b) r -= it.value() * p[static_cast<std::size_t>(it.col())];
      }
      rhs[i - a] = r;
    }
    sol = blocks[l].solve(rhs);
    for (Eigen::Index i = a; i < b; ++i) p[static_cast<std::size_t>(i)] = std::max(sol[i - a], 0.0);
  };

  StationaryResult out;
  for (int it = 1; it <= options.max_iterations; ++it) {
    // Aggregation: coarse generator over levels with the current in-level weights.
    std::fill(mass.begin(), mass.end(), 0.0);
    for (std::size_t r = 0; r < n; ++r) mass[level[r]] += p[r];
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t l = level[r];
      weight[r] = mass[l] > negligible_mass
                      ? p[r] / mass[l]
                      : 1.0 / static_cast<double>(start[l + 1] - start[l]);
    }
    std::fill(coarse.begin(), coarse.end(), 0.0);
    for (Eigen::Index i = 0; i < q.outerSize(); ++i) {
      const std::size_t li = level[static_cast<std::size_t>(i)];
      for (RowMatrix::InnerIterator e(q, i); e; ++e) {
        const auto j = static_cast<std::size_t>(e.col());
        const std::size_t lj = level[j];
        coarse[lj * width + (li + band - lj)] += e.value() * weight[j];
      }
    }
    std::vector<Eigen::Triplet<double>> entries;
    for (std::size_t lj = 0; lj < levels; ++lj) {
      entries.emplace_back(0, lj, 1.0);
      for (std::size_t k = 0; k < width; ++k) {
        const double v = coarse[lj * width + k];
        if (v == 0.0 || lj + k < band) continue;
        const std::size_t li = lj + k - band;
        if (li == 0 || li >= levels) continue;
        entries.emplace_back(li, lj, v);
      }
    }
    ColMatrix c(static_cast<Eigen::Index>(levels), static_cast<Eigen::Index>(levels));
    c.setFromTriplets(entries.begin(), entries.end());
    LU coarse_lu;
    coarse_lu.compute(c);
    if (coarse_lu.info() != Eigen::Success) {
      throw Error(ErrorCode::singular_system, "aggregated generator is singular");
    }
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(levels));
    e0[0] = 1.0;
    Eigen::VectorXd z = coarse_lu.solve(e0);
    for (std::size_t r = 0; r < n; ++r) p[r] = weight[r] * std::max(z[static_cast<Eigen::Index>(level[r])], 0.0);

    // Disaggregation smoothing: forward then backward block Gauss-Seidel.
    for (std::size_t l = 0; l < levels; ++l) smooth_level(l);
    for (std::size_t l = levels; l-- > 0;) smooth_level(l);
    clean_and_normalize(p);

    out.iterations = it;
    out.residual = scaled_residual(q, p, scale);
    if (out.residual <= options.tol) break;
  }
  if (!(out.residual <= options.tol)) {
    throw Error(ErrorCode::non_convergence,
                "aggregation solver stopped after " + std::to_string(out.iterations) +
                    " iterations with scaled residual " + std::to_string(out.residual));
  }
  out.p.assign(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) out.p[order[r]] = p[r];
  return out;
}

}  // namespace

std::size_t closed_class_count(const SparseGenerator& generator) {
  std::size_t components = 0;
  const auto comp = strongly_connected(generator.matrix, components);
  std::vector<char> open(components, 0);
  const ColMatrix& q = generator.matrix;
  for (Eigen::Index j = 0; j < q.outerSize(); ++j) {
    for (ColMatrix::InnerIterator it(q, j); it; ++it) {
      if (it.value() > 0.0 && comp[static_cast<std::size_t>(it.row())] != comp[static_cast<std::size_t>(j)]) {
        open[comp[static_cast<std::size_t>(j)]] = 1;
      }
    }
  }
  return static_cast<std::size_t>(std::count(open.begin(), open.end(), 0));
}

StationaryResult stationary_distribution(const SparseGenerator& generator,
                                         const StationaryOptions& options) {
  if (generator.matrix.rows() == 0) throw Error(ErrorCode::invalid_argument, "empty generator");
  if (!(options.tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
  const std::size_t closed = closed_class_count(generator);
  if (closed != 1) {
    throw Error(ErrorCode::reducible_generator,
                "generator has " + std::to_string(closed) +
                    " closed communicating classes, the stationary vector is not unique");
  }
  using Solver = StationaryOptions::Solver;
  const bool aggregate = options.solver == Solver::aggregation ||
                         (options.solver == Solver::automatic && options.aggregation.has_value());
  if (aggregate) {
    if (!options.aggregation) {
      throw Error(ErrorCode::invalid_argument, "aggregation solver needs a slow projection");
    }
    try {
      return solve_aggregation(generator, *options.aggregation, options);
    } catch (const BlockFailure&) {
      if (options.solver == Solver::aggregation) {
        throw Error(ErrorCode::singular_system, "a level block of the generator is singular");
      }
    }
  }
  auto out = solve_direct(generator);
  if (!(out.residual <= options.tol)) {
    throw Error(ErrorCode::non_convergence,
                "direct solve reached scaled residual " + std::to_string(out.residual));
  }
  return out;
}

}  // namespace mscale
