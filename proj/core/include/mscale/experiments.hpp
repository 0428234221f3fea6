#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mscale/cme.hpp"
#include "mscale/estimators.hpp"
#include "mscale/metrics.hpp"
#include "mscale/ssa.hpp"

namespace mscale {

/// Settings shared by the experiment drivers. Unset optional fields take
/// per-experiment defaults (see README, "Experiments").
struct ExperimentConfig {
  std::string experiment = "fig1a";  // fig1a | fig1b | fig2 | fig3 | fig4 | custom
  std::filesystem::path network;     // empty: built-in linear or bistable system
  ParameterOverrides overrides;      // applied to the network parameters
  std::vector<Method> methods{Method::cma, Method::nma, Method::qssma};
  std::optional<std::pair<Count, Count>> grid;
  std::vector<std::uint64_t> budgets;  // empty: 10^1 .. 10^7
  /// K (fig1a, fig2) or lambda (fig1b). Unset: per-experiment default; an
  /// explicitly empty sweep is an error.
  std::optional<std::vector<double>> sweep;
  std::optional<std::pair<double, double>> slope_window;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::filesystem::path out_dir = "results";
  NmaClosure closure = NmaClosure::mean;
  unsigned replicates = 1;
  double burn_in_fraction = 0.01;
  /// Budgets above the cap are skipped unless full_sweep is set.
  std::uint64_t budget_cap = 10'000'000;
  bool full_sweep = false;

  // fig3
  std::optional<StateVector> initial_state;
  double t_end = 2.0;
  double sample_interval = 0.01;

  // fig4
  std::vector<Count> domain;        // empty: network file domain or [1000, 1500]
  std::vector<Count> check_domain;  // optional second truncation
  double cme_tol = 1e-14;
  double support_threshold = 1e-12;
};

/// Reads a JSON config file. Unknown keys raise Error(parse_error).
ExperimentConfig load_config(const std::filesystem::path& path);

/// log-spaced values lo * (hi/lo)^(i/(n-1)), i = 0..n-1.
std::vector<double> log_space(double lo, double hi, std::size_t n);
/// 10^a, 10^(a+1), ..., 10^b.
std::vector<std::uint64_t> decade_budgets(int a, int b);

struct SweepResult {
  std::vector<double> x;
  std::vector<double> error;
  std::vector<double> poisson_at_zero;  // fig1b only
  double slope = 0.0;
};

struct MethodErrorRow {
  double K = 0.0;  // fig2 only
  Method method = Method::qssma;
  std::uint64_t budget = 0;
  unsigned replicate = 0;
  double error = 0.0;  // nan when a grid point failed
  std::uint64_t cost = 0;
  double wall_ms = 0.0;
};

struct Fig2Result {
  std::vector<MethodErrorRow> rows;
  std::vector<DriftDiffusionTable> tables;  // one per row, same order
};

struct Fig4Result {
  DiscreteDistribution reference;  // marginal of the Omega solve
  std::optional<double> truncation_difference;
  StationaryResult solve_info;
  std::pair<Count, Count> grid;
  std::vector<MethodErrorRow> rows;
  std::vector<DriftDiffusionTable> tables;
};

/// QSSA error for the linear system over the K sweep (default 10^1..10^5).
SweepResult run_fig1a(const ExperimentConfig& config);
/// Diffusion-approximation error over the lambda sweep (default 1..300).
SweepResult run_fig1b(const ExperimentConfig& config);
/// CMA / NMA / QSSMA total error for the linear system for every K in sweep.
Fig2Result run_fig2(const ExperimentConfig& config);
/// SSA of the bistable system with cumulative reaction counts on a mesh.
Trajectory run_fig3(const ExperimentConfig& config);
/// Truncated CME reference and method errors for the bistable system.
Fig4Result run_fig4(const ExperimentConfig& config);

/// Runs config.experiment and writes its CSVs and <name>.meta.json into
/// config.out_dir. Returns the written file paths.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config);

/// Local maxima of a pmf strictly inside its support, after dropping entries
/// below threshold at both ends.
std::vector<Count> interior_maxima(const DiscreteDistribution& pmf, double threshold = 0.0);

/// Smallest [lo, hi] containing every entry above threshold.
std::pair<Count, Count> support_above(const DiscreteDistribution& pmf, double threshold);

/// Resolved network for an experiment: the file if config.network is set,
/// otherwise the built-in system; overrides and (for fig2) K are applied.
NetworkSpec experiment_network(const ExperimentConfig& config, std::optional<double> K = {});

std::string_view git_commit();

}  // namespace mscale
