#pragma once

#include <Eigen/SparseCore>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "mscale/distribution.hpp"
#include "mscale/reaction_model.hpp"

namespace mscale {

/// lambda^n e^-lambda / n!, evaluated in log space. Zero for n < 0.
double poisson_pmf(double lambda, Count n);
/// Poisson masses on [first, last] (not renormalized).
DiscreteDistribution poisson_distribution(double lambda, Count first, Count last);
/// Poisson masses on [0, n_max] with n_max covering the mean plus 12 sd.
DiscreteDistribution poisson_distribution(double lambda);

struct PoissonLaw {
  double intensity = 0.0;
};

/// Stationary law of S = X1 + X2 in the linear system: Poisson(lambda0) with
/// lambda0 = (k1 V / k2)(2 + k2 / K).
PoissonLaw linear_exact_slow_distribution(double k1, double k2, double volume, double K);
/// Poisson(2 k1 V / k2), the quasi-steady-state prediction.
PoissonLaw linear_qssa_slow_distribution(double k1, double k2, double volume);

/// lambda1 = k1 V / k2 and lambda2 = lambda1 (K + k2) / K. In the stationary
/// law X2 has mean lambda1 and X1 has mean lambda2 (X1 receives the inflow).
struct LinearJointIntensities {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};
LinearJointIntensities linear_joint_intensities(double k1, double k2, double volume, double K);

/// Independent Poisson product: X1 ~ Poisson(lambda2), X2 ~ Poisson(lambda1).
double exact_joint_pmf_linear(double k1, double k2, double volume, double K, Count x1, Count x2);

/// Lattice [0, b_0] x ... x [0, b_{N-1}], enumerated row-major in species
/// order (the last species varies fastest).
class TruncatedDomain {
 public:
  TruncatedDomain() = default;
  /// Throws Error(domain_too_small) unless every bound is positive.
  explicit TruncatedDomain(std::vector<Count> upper_bounds);

  const std::vector<Count>& upper_bounds() const { return bounds_; }
  std::size_t dimension() const { return bounds_.size(); }
  std::size_t size() const { return size_; }
  bool contains(std::span<const Count> x) const;
  std::size_t index(std::span<const Count> x) const;
  StateVector state(std::size_t index) const;

 private:
  std::vector<Count> bounds_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

/// Generator Q with Q(to, from) = transition rate, columns summing to zero,
/// so that dp/dt = Q p. Transitions leaving the domain are dropped.
struct SparseGenerator {
  TruncatedDomain domain;
  Eigen::SparseMatrix<double> matrix;  // column-major
  double max_exit_rate = 0.0;          // max |Q_ii|
  double max_column_sum = 0.0;         // max |sum_i Q_ij|, ~ roundoff
};

/// Throws Error(dimension_mismatch) for a domain of the wrong dimension and
/// Error(domain_too_small) if no transition stays inside the domain.
SparseGenerator build_generator(const ReactionNetwork& network, const TruncatedDomain& domain);

struct StationaryOptions {
  enum class Solver { automatic, direct, aggregation };
  Solver solver = Solver::automatic;
  /// Convergence when ||Q p||_2 <= tol * max|Q_ii| * ||p||_2.
  double tol = 1e-12;
  int max_iterations = 300;
  /// Aggregates for the iterative solver: lattice states with the same slow
  /// value. Required for the aggregation solver; automatic uses it if given.
  std::optional<SlowProjection> aggregation;
};

struct StationaryResult {
  std::vector<double> p;      // lattice probabilities, sum 1
  double residual = 0.0;      // ||Q p||_2 / (max|Q_ii| ||p||_2)
  int iterations = 0;         // 0 for the direct solver
};

/// Stationary vector of a generator with a single closed communicating class.
/// Throws Error(reducible_generator) if there are several closed classes,
/// Error(singular_system) if a factorization fails and Error(non_convergence)
/// with the achieved residual when the iteration budget runs out.
StationaryResult stationary_distribution(const SparseGenerator& generator,
                                         const StationaryOptions& options = {});

/// Number of closed communicating classes of the generator's jump graph.
std::size_t closed_class_count(const SparseGenerator& generator);

/// P(s) = sum of p(x) over lattice states with c.x = s.
DiscreteDistribution marginalize_slow(const TruncatedDomain& domain, std::span<const double> p,
                                      const SlowProjection& projection);

/// Columns x1,...,xN,p for entries above threshold.
void write_lattice_csv(const std::filesystem::path& path, const TruncatedDomain& domain,
                       std::span<const double> p, double threshold = 1e-16);

}  // namespace mscale
