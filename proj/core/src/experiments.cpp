#include "mscale/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include "json.hpp"
#include "mscale/csv.hpp"
#include "mscale/error.hpp"
#include "mscale/fpe_stationary.hpp"
#include "mscale/systems.hpp"

#ifndef MSCALE_GIT_COMMIT
#define MSCALE_GIT_COMMIT "unknown"
#endif

namespace mscale {

using json = nlohmann::json;

std::string_view git_commit() { return MSCALE_GIT_COMMIT; }

namespace {

std::pair<Count, Count> parse_grid(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::invalid_argument, "grid must be 'min:max'");
  try {
    return {std::stoll(text.substr(0, colon)), std::stoll(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw Error(ErrorCode::invalid_argument, "grid must be 'min:max', got '" + text + "'");
  }
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("config key '") + key + "': " + e.what());
  }
}

bool is_bistable_experiment(const std::string& name) { return name == "fig3" || name == "fig4"; }

void check_budgets(const std::vector<std::uint64_t>& budgets) {
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    if (budgets[i] == 0) throw Error(ErrorCode::invalid_argument, "budgets must be positive");
    if (i > 0 && budgets[i] <= budgets[i - 1]) {
      throw Error(ErrorCode::invalid_argument, "budgets must be ascending");
    }
  }
}

std::vector<std::uint64_t> effective_budgets(const ExperimentConfig& config) {
  auto budgets = config.budgets.empty() ? decade_budgets(1, config.full_sweep ? 10 : 7) : config.budgets;
  check_budgets(budgets);
  if (!config.full_sweep) {
    std::erase_if(budgets, [&config](std::uint64_t b) { return b > config.budget_cap; });
  }
  return budgets;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

/// Runs every method / budget / replicate on one network and grid.
void method_sweep(const ExperimentConfig& config, const NetworkSpec& spec,
                  const std::vector<Count>& grid, const DiscreteDistribution& reference, double K,
                  std::vector<MethodErrorRow>& rows, std::vector<DriftDiffusionTable>& tables) {
  const auto budgets = effective_budgets(config);
  for (Method method : config.methods) {
    const bool stochastic = method != Method::qssma;
    const std::vector<std::uint64_t> method_budgets =
        stochastic ? budgets : std::vector<std::uint64_t>{0};
    const unsigned replicates = stochastic ? std::max(config.replicates, 1u) : 1u;
    for (std::uint64_t budget : method_budgets) {
      for (unsigned r = 0; r < replicates; ++r) {
        TableOptions opt;
        opt.method = method;
        opt.budget = budget;
        opt.seed = config.seed;
        opt.workers = std::max(config.workers, 1u);
        opt.closure = config.closure;
        opt.constrained.burn_in_fraction = config.burn_in_fraction;
        opt.stream_offset = static_cast<std::uint64_t>(r) << 32;
        const auto start = std::chrono::steady_clock::now();
        auto table = build_table(spec, grid, opt);
        MethodErrorRow row;
        row.K = K;
        row.method = method;
        row.budget = budget;
        row.replicate = r;
        row.cost = table.total_cost();
        row.error = std::numeric_limits<double>::quiet_NaN();
        if (table.complete()) row.error = relative_l2_error(fpe_pmf(table), reference);
        row.wall_ms = elapsed_ms(start);
        rows.push_back(row);
        tables.push_back(std::move(table));
      }
    }
  }
}

std::vector<Count> grid_or(const ExperimentConfig& config, Count lo, Count hi) {
  if (config.grid) return integer_grid(config.grid->first, config.grid->second);
  return integer_grid(lo, hi);
}

NetworkSpec with_builtin_overrides(const std::string& experiment, const ParameterOverrides& overrides,
                                   std::optional<double> K) {
  if (is_bistable_experiment(experiment)) {
    BistableParameters p;
    for (const auto& [name, value] : overrides) {
      if (name == "k1") p.k1 = value;
      else if (name == "k2_per_V") p.k2_per_volume = value;
      else if (name == "k3_V") p.k3_volume = value;
      else if (name == "k4") p.k4 = value;
      else if (name == "k5_per_V") p.k5_per_volume = value;
      else if (name == "k6") p.k6 = value;
      else throw Error(ErrorCode::invalid_argument, "unknown bistable parameter '" + name + "'");
    }
    return bistable_system(p);
  }
  LinearParameters p;
  for (const auto& [name, value] : overrides) {
    if (name == "k1") p.k1 = value;
    else if (name == "k2") p.k2 = value;
    else if (name == "K") p.K = value;
    else if (name == "V") p.volume = value;
    else throw Error(ErrorCode::invalid_argument, "unknown linear-system parameter '" + name + "'");
  }
  if (K) p.K = *K;
  return linear_system(p);
}

json network_json(const NetworkSpec& spec) {
  json params = json::object();
  for (const auto& [k, v] : spec.parameters) params[k] = v;
  return {{"name", spec.name}, {"parameters", params}};
}

json row_json(const std::vector<MethodErrorRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"method", to_string(r.method)}, {"budget", r.budget}, {"replicate", r.replicate},
                   {"cost", r.cost}});
  }
  return out;
}

void write_rows(const std::filesystem::path& path, const std::vector<MethodErrorRow>& rows, bool with_K) {
  auto out = open_output(path);
  if (with_K) out << "K,";
  out << "method,budget,replicate,error,cost\n";
  for (const auto& r : rows) {
    if (with_K) out << format_double(r.K) << ',';
    out << to_string(r.method) << ',' << r.budget << ',' << r.replicate << ','
        << format_double(r.error) << ',' << r.cost << '\n';
  }
}

void write_timing(const std::filesystem::path& path, const std::vector<MethodErrorRow>& rows,
                  std::uint64_t seed) {
  std::vector<ErrorRecord> records;
  for (const auto& r : rows) {
    records.push_back({std::string(to_string(r.method)), r.budget, r.error, seed, r.wall_ms});
  }
  write_error_records(path, records);
}

}  // namespace

std::vector<double> log_space(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo) || n == 0) {
    throw Error(ErrorCode::invalid_argument, "log_space needs 0 < lo <= hi and n >= 1");
  }
  if (n == 1) return {lo};
  std::vector<double> out(n);
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo * std::exp(step * static_cast<double>(i));
  out.back() = hi;
  return out;
}

std::vector<std::uint64_t> decade_budgets(int a, int b) {
  std::vector<std::uint64_t> out;
  std::uint64_t v = 1;
  for (int e = 0; e <= b; ++e) {
    if (e >= a) out.push_back(v);
    v *= 10;
  }
  return out;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::parse_error, path.string() + ": expected a JSON object");

  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "experiment") c.experiment = get<std::string>(j, "experiment");
    else if (key == "network") c.network = get<std::string>(j, "network");
    else if (key == "set") {
      for (const auto& [name, v] : value.items()) c.overrides[name] = v.get<double>();
    } else if (key == "methods") {
      c.methods.clear();
      for (const auto& m : value) c.methods.push_back(parse_method(m.get<std::string>()));
    } else if (key == "grid") c.grid = parse_grid(get<std::string>(j, "grid"));
    else if (key == "budgets") {
      c.budgets.clear();
      for (const auto& b : value) c.budgets.push_back(static_cast<std::uint64_t>(b.get<double>()));
    } else if (key == "sweep") c.sweep = get<std::vector<double>>(j, "sweep");
    else if (key == "slope_window") {
      const auto w = get<std::vector<double>>(j, "slope_window");
      if (w.size() != 2) throw Error(ErrorCode::parse_error, "slope_window needs two values");
      c.slope_window = std::pair{w[0], w[1]};
    } else if (key == "seed") c.seed = get<std::uint64_t>(j, "seed");
    else if (key == "workers") c.workers = get<unsigned>(j, "workers");
    else if (key == "out") c.out_dir = get<std::string>(j, "out");
    else if (key == "closure") c.closure = parse_nma_closure(get<std::string>(j, "closure"));
    else if (key == "replicates") c.replicates = get<unsigned>(j, "replicates");
    else if (key == "burn_in_fraction") c.burn_in_fraction = get<double>(j, "burn_in_fraction");
    else if (key == "budget_cap") c.budget_cap = static_cast<std::uint64_t>(get<double>(j, "budget_cap"));
    else if (key == "full_sweep") c.full_sweep = get<bool>(j, "full_sweep");
    else if (key == "initial_state") c.initial_state = get<StateVector>(j, "initial_state");
    else if (key == "t_end") c.t_end = get<double>(j, "t_end");
    else if (key == "sample_interval") c.sample_interval = get<double>(j, "sample_interval");
    else if (key == "domain") c.domain = get<std::vector<Count>>(j, "domain");
    else if (key == "check_domain") c.check_domain = get<std::vector<Count>>(j, "check_domain");
    else if (key == "cme_tol") c.cme_tol = get<double>(j, "cme_tol");
    else if (key == "support_threshold") c.support_threshold = get<double>(j, "support_threshold");
    else throw Error(ErrorCode::parse_error, path.string() + ": unknown config key '" + key + "'");
  }
  if (c.workers == 0) throw Error(ErrorCode::invalid_argument, "workers must be >= 1");
  check_budgets(c.budgets);
  return c;
}

NetworkSpec experiment_network(const ExperimentConfig& config, std::optional<double> K) {
  if (config.network.empty()) return with_builtin_overrides(config.experiment, config.overrides, K);
  auto overrides = config.overrides;
  if (K) overrides["K"] = *K;
  return load_network(config.network, overrides);
}

std::vector<Count> interior_maxima(const DiscreteDistribution& pmf, double threshold) {
  if (pmf.size() < 3) return {};
  std::size_t lo = 0;
  std::size_t hi = pmf.size() - 1;
  while (lo < hi && pmf.masses[lo] <= threshold) ++lo;
  while (hi > lo && pmf.masses[hi] <= threshold) --hi;
  std::vector<Count> out;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    const double m = pmf.masses[i];
    if (m <= pmf.masses[i - 1]) continue;
    // Plateaus count once, at their left end, if they fall off on the right.
    std::size_t k = i;
    while (k + 1 < hi && pmf.masses[k + 1] == m) ++k;
    if (pmf.masses[k + 1] < m) out.push_back(pmf.first + static_cast<Count>(i));
  }
  return out;
}

std::pair<Count, Count> support_above(const DiscreteDistribution& pmf, double threshold) {
  std::optional<Count> lo;
  Count hi = 0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (pmf.masses[i] > threshold) {
      const Count n = pmf.first + static_cast<Count>(i);
      if (!lo) lo = n;
      hi = n;
    }
  }
  if (!lo) throw Error(ErrorCode::invalid_argument, "no mass above the support threshold");
  return {*lo, hi};
}

SweepResult run_fig1a(const ExperimentConfig& config) {
  const auto spec = experiment_network(config);
  const auto p = linear_parameters_of(spec.network);
  SweepResult out;
  out.x = config.sweep.value_or(log_space(10.0, 1e5, 41));
  if (out.x.empty()) throw Error(ErrorCode::invalid_argument, "empty K sweep");
  const double lq = linear_qssa_slow_distribution(p.k1, p.k2, p.volume).intensity;
  for (double K : out.x) {
    const double l0 = linear_exact_slow_distribution(p.k1, p.k2, p.volume, K).intensity;
    const auto last = static_cast<Count>(std::ceil(std::max(l0, lq) + 15.0 * std::sqrt(std::max(l0, lq)) + 30.0));
    out.error.push_back(relative_l2_error(poisson_distribution(l0, 0, last),
                                          poisson_distribution(lq, 0, last)));
  }
  const auto window = config.slope_window.value_or(std::pair{100.0, 1e4});
  try {
    out.slope = loglog_slope(out.x, out.error, window.first, window.second);
  } catch (const Error&) {
    out.slope = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

SweepResult run_fig1b(const ExperimentConfig& config) {
  SweepResult out;
  out.x = config.sweep.value_or(log_space(1.0, 300.0, 50));
  if (out.x.empty()) throw Error(ErrorCode::invalid_argument, "empty lambda sweep");
  for (double lambda : out.x) {
    const auto last = static_cast<Count>(std::ceil(lambda + 15.0 * std::sqrt(lambda) + 30.0));
    out.error.push_back(relative_l2_error(birth_death_pmf(lambda, last),
                                          poisson_distribution(lambda, 0, last)));
    out.poisson_at_zero.push_back(poisson_pmf(lambda, 0));
  }
  const auto window = config.slope_window.value_or(std::pair{50.0, 300.0});
  try {
    out.slope = loglog_slope(out.x, out.error, window.first, window.second);
  } catch (const Error&) {
    out.slope = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

Fig2Result run_fig2(const ExperimentConfig& config) {
  const auto sweep = config.sweep.value_or(std::vector<double>{10.0, 200.0, 1000.0});
  if (sweep.empty()) throw Error(ErrorCode::invalid_argument, "empty K sweep");
  Fig2Result out;
  for (double K : sweep) {
    const auto spec = experiment_network(config, K);
    const auto p = linear_parameters_of(spec.network);
    const double l0 = linear_exact_slow_distribution(p.k1, p.k2, p.volume, p.K).intensity;
    const auto grid = grid_or(config, spec.projection.s_min, spec.projection.s_max);
    method_sweep(config, spec, grid, poisson_distribution(l0), K, out.rows, out.tables);
  }
  return out;
}

Trajectory run_fig3(const ExperimentConfig& config) {
  const auto spec = experiment_network(config);
  StateVector x0 = config.initial_state.value_or(spec.initial_state.value_or(StateVector{100, 100}));
  RandomStream rng(config.seed, 0);
  RecorderOptions rec;
  rec.mode = Recording::counts;
  rec.sample_interval = config.sample_interval;
  return simulate(spec.network, x0, config.t_end, rng, rec);
}

Fig4Result run_fig4(const ExperimentConfig& config) {
  const auto spec = experiment_network(config);
  const auto domain = !config.domain.empty() ? config.domain
                      : !spec.domain.empty() ? spec.domain
                                             : std::vector<Count>{1000, 1500};
  StationaryOptions so;
  so.tol = config.cme_tol;
  so.aggregation = spec.projection;

  Fig4Result out;
  {
    const auto gen = build_generator(spec.network, TruncatedDomain(domain));
    out.solve_info = stationary_distribution(gen, so);
    out.reference = marginalize_slow(gen.domain, out.solve_info.p, spec.projection);
  }
  if (!config.check_domain.empty()) {
    const auto gen = build_generator(spec.network, TruncatedDomain(config.check_domain));
    const auto res = stationary_distribution(gen, so);
    const auto check = marginalize_slow(gen.domain, res.p, spec.projection);
    out.truncation_difference = relative_l2_error(check, out.reference);
  }
  out.grid = config.grid.value_or(support_above(out.reference, config.support_threshold));
  const auto grid = integer_grid(out.grid.first, out.grid.second);
  method_sweep(config, spec, grid, out.reference, 0.0, out.rows, out.tables);
  out.solve_info.p.clear();
  out.solve_info.p.shrink_to_fit();
  return out;
}

std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config) {
  const auto& name = config.experiment;
  const auto dir = config.out_dir;
  std::vector<std::filesystem::path> files;
  json meta = {{"experiment", name},
               {"seed", config.seed},
               {"rng", RandomStream::algorithm},
               {"commit", git_commit()},
               {"version", "0.1.0"}};

  if (name == "fig1a" || name == "fig1b") {
    const bool a = name == "fig1a";
    const auto r = a ? run_fig1a(config) : run_fig1b(config);
    const auto path = dir / (name + ".csv");
    auto out = open_output(path);
    out << (a ? "K,error_qssa\n" : "lambda,error_fpe,poisson_at_zero\n");
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      out << format_double(r.x[i]) << ',' << format_double(r.error[i]);
      if (!a) out << ',' << format_double(r.poisson_at_zero[i]);
      out << '\n';
    }
    files.push_back(path);
    meta["sweep"] = r.x;
    meta["slope"] = std::isnan(r.slope) ? json(nullptr) : json(r.slope);
    const auto window = config.slope_window.value_or(a ? std::pair{100.0, 1e4} : std::pair{50.0, 300.0});
    meta["slope_window"] = {window.first, window.second};
    if (a) meta["network"] = network_json(experiment_network(config));
  } else if (name == "fig2") {
    const auto r = run_fig2(config);
    files.push_back(dir / "fig2.csv");
    write_rows(files.back(), r.rows, true);
    write_timing(dir / "fig2_timing.csv", r.rows, config.seed);
    files.push_back(dir / "fig2_timing.csv");
    meta["sweep"] = config.sweep.value_or(std::vector<double>{10.0, 200.0, 1000.0});
    meta["network"] = network_json(experiment_network(config));
    meta["runs"] = row_json(r.rows);
  } else if (name == "fig3") {
    const auto spec = experiment_network(config);
    const auto traj = run_fig3(config);
    const auto path = dir / "fig3.csv";
    auto out = open_output(path);
    out << 't';
    for (const auto& rx : spec.network.reactions()) out << ',' << rx.label;
    out << '\n';
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      out << format_double(traj.times[i]);
      for (auto c : traj.counts[i]) out << ',' << c;
      out << '\n';
    }
    files.push_back(path);
    meta["network"] = network_json(spec);
    meta["t_end"] = config.t_end;
    meta["sample_interval"] = config.sample_interval;
    meta["events"] = traj.events;
  } else if (name == "fig4") {
    const auto r = run_fig4(config);
    files.push_back(dir / "fig4_marginal.csv");
    write_pmf_csv(files.back(), r.reference, "s", "P");
    files.push_back(dir / "fig4.csv");
    write_rows(files.back(), r.rows, false);
    write_timing(dir / "fig4_timing.csv", r.rows, config.seed);
    files.push_back(dir / "fig4_timing.csv");
    meta["network"] = network_json(experiment_network(config));
    meta["grid"] = {r.grid.first, r.grid.second};
    meta["solver_iterations"] = r.solve_info.iterations;
    meta["solver_residual"] = r.solve_info.residual;
    meta["interior_maxima"] = interior_maxima(r.reference, config.support_threshold);
    if (r.truncation_difference) meta["truncation_difference"] = *r.truncation_difference;
    meta["runs"] = row_json(r.rows);
  } else if (name == "custom") {
    if (config.network.empty()) throw Error(ErrorCode::invalid_argument, "custom experiments need a network");
    const auto spec = experiment_network(config);
    const auto grid = grid_or(config, spec.projection.s_min, spec.projection.s_max);
    for (Method method : config.methods) {
      const auto budgets = method == Method::qssma ? std::vector<std::uint64_t>{0} : effective_budgets(config);
      for (std::uint64_t budget : budgets) {
        TableOptions opt;
        opt.method = method;
        opt.budget = budget;
        opt.seed = config.seed;
        opt.workers = std::max(config.workers, 1u);
        opt.closure = config.closure;
        opt.constrained.burn_in_fraction = config.burn_in_fraction;
        const auto table = build_table(spec, grid, opt);
        const std::string stem = "custom_" + std::string(to_string(method)) + "_" + std::to_string(budget);
        files.push_back(dir / (stem + "_table.csv"));
        write_table_csv(files.back(), table);
        if (table.complete()) {
          files.push_back(dir / (stem + "_pmf.csv"));
          write_pmf_csv(files.back(), fpe_pmf(table), "s", "P");
        }
      }
    }
    meta["network"] = network_json(spec);
  } else {
    throw Error(ErrorCode::invalid_argument, "unknown experiment '" + name + "'");
  }

  if (name == "fig2" || name == "fig4" || name == "custom") {
    std::vector<std::string> methods;
    for (auto m : config.methods) methods.emplace_back(to_string(m));
    meta["methods"] = methods;
    meta["budgets"] = effective_budgets(config);
    meta["replicates"] = config.replicates;
    meta["closure"] = to_string(config.closure);
    meta["burn_in_fraction"] = config.burn_in_fraction;
    meta["budget_cap"] = config.budget_cap;
    meta["full_sweep"] = config.full_sweep;
    if (config.grid) meta["grid"] = {config.grid->first, config.grid->second};
  }
  std::vector<std::string> names;
  for (const auto& f : files) names.push_back(f.filename().string());
  meta["files"] = names;
  const auto meta_path = dir / (name + ".meta.json");
  auto out = open_output(meta_path);
  out << meta.dump(2) << '\n';
  files.push_back(meta_path);
  return files;
}

}  // namespace mscale
