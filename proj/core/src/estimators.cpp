#include "mscale/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <thread>

#include "compiled_network.hpp"
#include "mscale/csv.hpp"
#include "mscale/error.hpp"

namespace mscale {

DriftDiffusion cma_estimate(const JumpStatistics& stats) {
  if (!(stats.elapsed_time > 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "no elapsed time recorded at s = " + std::to_string(stats.s));
  }
  return {stats.increment_sum() / stats.elapsed_time,
          stats.increment_square_sum() / (2.0 * stats.elapsed_time)};
}

DriftDiffusion drift_diffusion_from_propensities(std::span<const EffectivePropensity> props) {
  if (props.empty()) throw Error(ErrorCode::invalid_argument, "empty effective propensity set");
  DriftDiffusion out;
  for (const auto& p : props) {
    const auto nu = static_cast<double>(p.slow_change);
    out.drift += p.value * nu;
    out.diffusion += 0.5 * p.value * nu * nu;
  }
  return out;
}

std::string_view to_string(NmaClosure closure) {
  return closure == NmaClosure::mean ? "mean" : "moments";
}

NmaClosure parse_nma_closure(std::string_view text) {
  if (text == "mean") return NmaClosure::mean;
  if (text == "moments") return NmaClosure::moments;
  throw Error(ErrorCode::invalid_argument, "unknown NMA closure '" + std::string(text) + "'");
}

EffectivePropensitySet nma_propensities(const ReactionNetwork& network,
                                        const SlowProjection& projection,
                                        const FastAverages& averages, NmaClosure closure) {
  const detail::CompiledNetwork slow(network, network.slow_set());
  if (averages.means.size() != network.species_count() ||
      averages.slow_propensity_means.size() != slow.size()) {
    throw Error(ErrorCode::dimension_mismatch, "fast averages do not match the network");
  }
  EffectivePropensitySet out;
  for (std::size_t k = 0; k < slow.size(); ++k) {
    const double value = closure == NmaClosure::mean ? slow.propensity_at(k, averages.means.data())
                                                     : averages.slow_propensity_means[k];
    out.push_back({value, slow_change(projection, network, slow.source_index(k))});
  }
  return out;
}

EffectivePropensitySet nma_estimate(const ReactionNetwork& network,
                                    const SlowProjection& projection, Count s,
                                    std::uint64_t n_fast, RandomStream& rng, NmaClosure closure,
                                    const ConstrainedOptions& options) {
  const auto averages = run_fast_subsystem(network, projection, s, n_fast, rng, options);
  return nma_propensities(network, projection, averages, closure);
}

EffectivePropensitySet qssma_linear_propensities(double k1, double k2, double volume, double s) {
  if (s < 0.0) throw Error(ErrorCode::invalid_argument, "slow value must be non-negative");
  return {{k1 * volume, +1}, {k2 * s / 2.0, -1}};
}

BistableQssma qssma_bistable(const BistableParameters& p, double s) {
  if (s < 0.0) throw Error(ErrorCode::invalid_argument, "slow value must be non-negative");
  BistableQssma out;
  const double ratio = p.k6 / p.k5_per_volume;  // V k6 / k5
  out.mean_x1 = ratio / 4.0 * (std::sqrt(1.0 + 8.0 * s / ratio) - 1.0);
  out.mean_x2 = (s - out.mean_x1) / 2.0;
  const double x2 = out.mean_x2;

  const double denominator = 8.0 * p.k5_per_volume * x2 - 2.0 * p.k5_per_volume * (2.0 * s + 3.0) - p.k6;
  if (denominator == 0.0) {
    throw Error(ErrorCode::singular_system,
                "effective propensity denominator vanishes at s = " + format_double(s));
  }
  out.correction = 2.0 * p.k2_per_volume * p.k6 * x2 / denominator;
  const double a2 = p.k2_per_volume * s * x2 - 2.0 * p.k2_per_volume * x2 * x2 + out.correction;
  const double magnitude = std::abs(a2 - out.correction) + std::abs(out.correction);
  out.correction_share = magnitude > 0.0 ? std::abs(out.correction) / magnitude : 0.0;
  out.propensities = {{p.k1 * x2, +1},
                      {std::max(a2, 0.0), -1},
                      {p.k3_volume, +1},
                      {p.k4 * out.mean_x1, -1}};
  return out;
}

EffectivePropensitySet qssma_bistable_propensities(const BistableParameters& p, double s) {
  return qssma_bistable(p, s).propensities;
}

EffectivePropensitySet qssma_propensities(const NetworkSpec& spec, double s) {
  switch (spec.qssma) {
    case QssmaKind::linear: {
      const auto p = linear_parameters_of(spec.network);
      return qssma_linear_propensities(p.k1, p.k2, p.volume, s);
    }
    case QssmaKind::dimerisation:
      return qssma_bistable_propensities(bistable_parameters_of(spec.network), s);
    case QssmaKind::none:
      break;
  }
  throw Error(ErrorCode::invalid_argument,
              "network '" + spec.name + "' has no closed-form QSSMA closure");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::cma: return "cma";
    case Method::nma: return "nma";
    case Method::qssma: return "qssma";
  }
  return "qssma";
}

Method parse_method(std::string_view text) {
  if (text == "cma" || text == "CMA") return Method::cma;
  if (text == "nma" || text == "NMA") return Method::nma;
  if (text == "qssma" || text == "QSSMA") return Method::qssma;
  throw Error(ErrorCode::invalid_argument, "unknown method '" + std::string(text) + "'");
}

bool DriftDiffusionTable::complete() const {
  for (const auto& e : errors) {
    if (!e.empty()) return false;
  }
  return true;
}

std::uint64_t DriftDiffusionTable::total_cost() const {
  std::uint64_t total = 0;
  for (auto c : cost) total += c;
  return total;
}

std::vector<Count> integer_grid(Count s_min, Count s_max) {
  if (s_min > s_max) throw Error(ErrorCode::invalid_argument, "grid minimum exceeds maximum");
  std::vector<Count> grid;
  for (Count s = s_min; s <= s_max; ++s) grid.push_back(s);
  return grid;
}

namespace {

struct PointResult {
  DriftDiffusion dd;
  std::uint64_t cost = 0;
};

PointResult evaluate_point(const NetworkSpec& spec, Count s, std::uint64_t stream,
                           const TableOptions& options) {
  PointResult r;
  switch (options.method) {
    case Method::qssma:
      r.dd = drift_diffusion_from_propensities(qssma_propensities(spec, static_cast<double>(s)));
      break;
    case Method::cma: {
      RandomStream rng(options.seed, stream);
      const auto stats = run_cssa(spec.network, spec.projection, s, StopRule::events(options.budget),
                                  rng, options.constrained);
      r.dd = cma_estimate(stats);
      r.cost = stats.iterations;
      break;
    }
    case Method::nma: {
      RandomStream rng(options.seed, stream);
      const auto averages = run_fast_subsystem(spec.network, spec.projection, s, options.budget,
                                               rng, options.constrained);
      r.dd = drift_diffusion_from_propensities(
          nma_propensities(spec.network, spec.projection, averages, options.closure));
      r.cost = averages.iterations;
      break;
    }
  }
  return r;
}

}  // namespace

DriftDiffusionTable build_table(const NetworkSpec& spec, std::span<const Count> grid,
                                const TableOptions& options) {
  if (grid.empty()) throw Error(ErrorCode::invalid_argument, "empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) throw Error(ErrorCode::invalid_argument, "grid must be increasing");
  }
  if (options.method != Method::qssma && options.budget == 0) {
    throw Error(ErrorCode::invalid_argument, "budget must be positive");
  }
  if (options.workers == 0) throw Error(ErrorCode::invalid_argument, "worker count must be >= 1");

  const std::size_t n = grid.size();
  DriftDiffusionTable table;
  table.method = options.method;
  table.seed = options.seed;
  table.budget = options.method == Method::qssma ? 0 : options.budget;
  table.grid.assign(grid.begin(), grid.end());
  table.drift.assign(n, std::numeric_limits<double>::quiet_NaN());
  table.diffusion.assign(n, std::numeric_limits<double>::quiet_NaN());
  table.cost.assign(n, 0);
  table.stream_id.resize(n);
  table.errors.assign(n, std::string());
  for (std::size_t i = 0; i < n; ++i) table.stream_id[i] = options.stream_offset + i;

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const auto r = evaluate_point(spec, grid[i], table.stream_id[i], options);
        table.drift[i] = r.dd.drift;
        table.diffusion[i] = r.dd.diffusion;
        table.cost[i] = r.cost;
      } catch (const Error& e) {
        table.errors[i] = std::string(to_string(e.code())) + ": " + e.what();
      }
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(options.workers, n));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return table;
}

void write_table_csv(std::ostream& out, const DriftDiffusionTable& table) {
  out << "s,V,D,cost,method,seed,stream_id\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.grid[i] << ',' << format_double(table.drift[i]) << ','
        << format_double(table.diffusion[i]) << ',' << table.cost[i] << ','
        << to_string(table.method) << ',' << table.seed << ',' << table.stream_id[i] << '\n';
  }
}

void write_table_csv(const std::filesystem::path& path, const DriftDiffusionTable& table) {
  auto out = open_output(path);
  write_table_csv(out, table);
}

DriftDiffusionTable read_table_csv(const std::filesystem::path& path) {
  const auto csv = read_csv(path);
  const auto cs = csv.column("s");
  const auto cv = csv.column("V");
  const auto cd = csv.column("D");
  auto optional_column = [&](const char* name) -> std::optional<std::size_t> {
    const auto it = std::find(csv.header.begin(), csv.header.end(), name);
    if (it == csv.header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - csv.header.begin());
  };
  const auto ccost = optional_column("cost");
  const auto cseed = optional_column("seed");
  const auto cstream = optional_column("stream_id");
  const auto cmethod = optional_column("method");
  DriftDiffusionTable table;
  for (const auto& row : csv.rows) {
    table.grid.push_back(static_cast<Count>(std::stoll(row[cs])));
    table.drift.push_back(parse_double(row[cv]));
    table.diffusion.push_back(parse_double(row[cd]));
    table.cost.push_back(ccost ? std::stoull(row[*ccost]) : 0);
    table.stream_id.push_back(cstream ? std::stoull(row[*cstream]) : table.grid.size() - 1);
    table.errors.emplace_back();
  }
  if (!csv.rows.empty()) {
    if (cmethod) table.method = parse_method(csv.rows.front()[*cmethod]);
    if (cseed) table.seed = std::stoull(csv.rows.front()[*cseed]);
  }
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (std::isnan(table.drift[i]) || std::isnan(table.diffusion[i])) table.errors[i] = "missing value";
  }
  return table;
}

unsigned default_workers() {
  if (const char* env = std::getenv("MSCALE_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

}  // namespace mscale
