#include "cli.hpp"

#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "mscale/cme.hpp"
#include "mscale/csv.hpp"
#include "mscale/error.hpp"
#include "mscale/estimators.hpp"
#include "mscale/experiments.hpp"
#include "mscale/fpe_stationary.hpp"
#include "mscale/network_file.hpp"
#include "mscale/ssa.hpp"
#include "mscale/systems.hpp"

namespace mscale {
namespace {

std::pair<Count, Count> parse_grid_flag(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::invalid_argument, "--grid expects MIN:MAX, got '" + text + "'");
  }
  try {
    std::size_t a = 0;
    std::size_t b = 0;
    const std::string lo = text.substr(0, colon);
    const std::string hi = text.substr(colon + 1);
    const Count s_min = std::stoll(lo, &a);
    const Count s_max = std::stoll(hi, &b);
    if (a != lo.size() || b != hi.size()) throw std::invalid_argument("trailing characters");
    if (s_min > s_max) throw Error(ErrorCode::invalid_argument, "--grid needs MIN <= MAX");
    return {s_min, s_max};
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::invalid_argument, "--grid expects MIN:MAX, got '" + text + "'");
  }
}

ParameterOverrides parse_sets(const std::vector<std::string>& sets) {
  ParameterOverrides out;
  for (const auto& s : sets) {
    auto [name, value] = parse_override(s);
    out.insert_or_assign(std::move(name), value);
  }
  return out;
}

/// A missing network argument selects the built-in linear system.
NetworkSpec network_or_linear(const std::string& path, const ParameterOverrides& overrides) {
  if (!path.empty()) return load_network(path, overrides);
  ExperimentConfig c;
  c.experiment = "fig2";
  c.overrides = overrides;
  return experiment_network(c);
}

std::string quoted(std::string_view text) {
  std::string out;
  for (char ch : text) {
    if (ch == '"' || ch == '\\') out.push_back('\\');
    out.push_back(ch == '\n' ? ' ' : ch);
  }
  return out;
}

struct Options {
  std::string network;
  std::string config;
  std::string experiment;
  std::string table;
  std::string out;
  std::string density_out;
  std::string lattice_out;
  std::string grid;
  std::string closure = "mean";
  std::string solver = "auto";
  std::vector<std::string> methods;
  std::vector<std::string> sets;
  std::vector<double> budgets;
  std::vector<double> sweep;
  std::vector<Count> domain;
  std::vector<Count> initial;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  unsigned replicates = 0;
  double t_end = 1.0;
  double sample_interval = 0.01;
  double tol = 1e-12;
  int refinement = 8;
  bool full_sweep = false;
};

void write_or_print(const std::string& path, std::ostream& out,
                    const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(out);
    return;
  }
  auto file = open_output(path);
  body(file);
}

int run_validate(const Options& o, std::ostream& out) {
  const auto spec = load_network(o.network, parse_sets(o.sets));
  const auto& net = spec.network;
  out << "network: " << spec.name << '\n';
  out << "species: " << net.species_count() << "  reactions: " << net.reaction_count()
      << "  fast: " << net.fast_set().size() << '\n';
  for (std::size_t j = 0; j < net.reaction_count(); ++j) {
    const auto& r = net.reaction(j);
    out << "  " << r.label << (net.is_fast(j) ? " fast" : " slow") << "  order " << r.order()
        << "  c = " << format_double(net.coefficient(j))
        << "  dS = " << slow_change(spec.projection, net, j) << '\n';
  }
  out << "grid: " << spec.projection.s_min << ':' << spec.projection.s_max << '\n';
  const auto report = validate_network(net, spec.projection);
  out << report.to_string() << '\n';
  if (!report.valid) {
    throw Error(ErrorCode::invalid_argument, "network " + spec.name + " failed validation");
  }
  return 0;
}

int run_simulate(const Options& o, std::ostream& out) {
  const auto spec = load_network(o.network, parse_sets(o.sets));
  StateVector x0 = o.initial.empty() ? spec.initial_state.value_or(StateVector{}) : o.initial;
  if (x0.empty()) throw Error(ErrorCode::invalid_argument, "no initial state: pass --initial");
  RandomStream rng(o.seed, 0);
  RecorderOptions rec;
  rec.mode = Recording::states;
  rec.sample_interval = o.sample_interval;
  const auto traj = simulate(spec.network, x0, o.t_end, rng, rec);
  write_or_print(o.out, out, [&](std::ostream& csv) {
    csv << 't';
    for (const auto& s : spec.network.species()) csv << ',' << s;
    for (const auto& r : spec.network.reactions()) csv << ',' << r.label;
    csv << '\n';
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      csv << format_double(traj.times[i]);
      for (auto x : traj.states[i]) csv << ',' << x;
      for (auto c : traj.counts[i]) csv << ',' << c;
      csv << '\n';
    }
  });
  return 0;
}

int run_estimate(const Options& o, std::ostream& out) {
  const auto spec = network_or_linear(o.network, parse_sets(o.sets));
  TableOptions opt;
  opt.method = o.methods.empty() ? Method::cma : parse_method(o.methods.front());
  if (o.methods.size() > 1) throw Error(ErrorCode::invalid_argument, "estimate takes one --method");
  opt.budget = o.budgets.empty() ? 10000 : static_cast<std::uint64_t>(o.budgets.front());
  if (opt.method != Method::qssma && opt.budget == 0) {
    throw Error(ErrorCode::invalid_argument, "--budget must be positive");
  }
  opt.seed = o.seed;
  opt.workers = o.workers > 0 ? o.workers : default_workers();
  opt.closure = parse_nma_closure(o.closure);
  const auto [lo, hi] = o.grid.empty() ? std::pair{spec.projection.s_min, spec.projection.s_max}
                                       : parse_grid_flag(o.grid);
  const auto table = build_table(spec, integer_grid(lo, hi), opt);
  write_or_print(o.out, out, [&](std::ostream& csv) { write_table_csv(csv, table); });
  return 0;
}

int run_solve_fpe(const Options& o, std::ostream& out) {
  const auto table = read_table_csv(o.table);
  const auto density = solve_stationary(table);
  const auto pmf = project_to_pmf(density, o.refinement).pmf;
  if (!o.density_out.empty()) write_density_csv(o.density_out, density);
  write_or_print(o.out, out, [&](std::ostream& csv) {
    csv << "s,P\n";
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      csv << pmf.first + static_cast<Count>(i) << ',' << format_double(pmf.masses[i]) << '\n';
    }
  });
  return 0;
}

int run_solve_cme(const Options& o, std::ostream& out, std::ostream& err) {
  const auto spec = load_network(o.network, parse_sets(o.sets));
  const auto bounds = o.domain.empty() ? spec.domain : o.domain;
  if (bounds.empty()) throw Error(ErrorCode::invalid_argument, "no truncation domain: pass --domain");
  StationaryOptions so;
  so.tol = o.tol;
  so.aggregation = spec.projection;
  if (o.solver == "direct") so.solver = StationaryOptions::Solver::direct;
  else if (o.solver == "aggregation") so.solver = StationaryOptions::Solver::aggregation;
  else if (o.solver != "auto") throw Error(ErrorCode::invalid_argument, "unknown solver '" + o.solver + "'");
  const auto gen = build_generator(spec.network, TruncatedDomain(bounds));
  const auto res = stationary_distribution(gen, so);
  err << "solve-cme: states " << gen.domain.size() << "  iterations " << res.iterations
      << "  residual " << format_double(res.residual) << '\n';
  if (!o.lattice_out.empty()) write_lattice_csv(o.lattice_out, gen.domain, res.p);
  const auto marginal = marginalize_slow(gen.domain, res.p, spec.projection);
  write_or_print(o.out, out, [&](std::ostream& csv) {
    csv << "s,P\n";
    for (std::size_t i = 0; i < marginal.size(); ++i) {
      csv << marginal.first + static_cast<Count>(i) << ',' << format_double(marginal.masses[i]) << '\n';
    }
  });
  return 0;
}

int run_experiment_command(const Options& o, std::ostream& out) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (!o.experiment.empty()) c.experiment = o.experiment;
  else if (o.config.empty()) throw Error(ErrorCode::invalid_argument, "experiment id or --config required");
  if (!o.network.empty()) c.network = o.network;
  for (const auto& [k, v] : parse_sets(o.sets)) c.overrides.insert_or_assign(k, v);
  if (!o.methods.empty()) {
    c.methods.clear();
    for (const auto& m : o.methods) c.methods.push_back(parse_method(m));
  }
  if (!o.grid.empty()) c.grid = parse_grid_flag(o.grid);
  if (!o.budgets.empty()) {
    c.budgets.clear();
    for (double b : o.budgets) {
      if (!(b >= 1.0)) throw Error(ErrorCode::invalid_argument, "budgets must be positive");
      c.budgets.push_back(static_cast<std::uint64_t>(b));
    }
  }
  if (!o.sweep.empty()) c.sweep = o.sweep;
  if (!o.out.empty()) c.out_dir = o.out;
  if (o.replicates > 0) c.replicates = o.replicates;
  if (o.full_sweep) c.full_sweep = true;
  c.seed = o.seed;
  c.workers = o.workers > 0 ? o.workers : (c.workers > 1 ? c.workers : default_workers());
  for (const auto& f : run_experiment(c)) out << f.string() << '\n';
  return 0;
}

}  // namespace

int cli_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiscale stochastic reaction network estimators", "mscale"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--set", o.sets, "Override a network parameter, NAME=VALUE")->take_all();
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--out", o.out, "Output file or directory");
  };

  auto* validate = app.add_subcommand("validate", "Check a network file and print a report");
  validate->add_option("network", o.network, "Network file")->required();
  validate->add_option("--set", o.sets, "Override a network parameter, NAME=VALUE")->take_all();

  auto* simulate_cmd = app.add_subcommand("simulate", "Run one SSA trajectory");
  simulate_cmd->add_option("network", o.network, "Network file")->required();
  add_common(simulate_cmd);
  simulate_cmd->add_option("--t-end", o.t_end, "Final time");
  simulate_cmd->add_option("--sample-interval", o.sample_interval, "Sampling mesh, 0 for every event");
  simulate_cmd->add_option("--initial", o.initial, "Initial copy numbers");

  auto* estimate = app.add_subcommand("estimate", "Build a drift/diffusion table");
  estimate->add_option("network", o.network, "Network file (default: built-in linear system)");
  add_common(estimate);
  estimate->add_option("--method", o.methods, "cma, nma or qssma");
  estimate->add_option("--grid", o.grid, "Slow-variable grid MIN:MAX");
  estimate->add_option("--budget", o.budgets, "Events per grid point");
  estimate->add_option("--workers", o.workers, "Worker threads (default: MSCALE_WORKERS or 1)");
  estimate->add_option("--closure", o.closure, "NMA closure: mean or moments");

  auto* fpe = app.add_subcommand("solve-fpe", "Stationary Fokker-Planck density of a table");
  fpe->add_option("table", o.table, "Table CSV written by estimate")->required();
  fpe->add_option("--out", o.out, "Projected pmf CSV");
  fpe->add_option("--density", o.density_out, "Also write the continuous density");
  fpe->add_option("--refinement", o.refinement, "Simpson panels per unit cell");

  auto* cme = app.add_subcommand("solve-cme", "Stationary truncated CME and its slow marginal");
  cme->add_option("network", o.network, "Network file")->required();
  add_common(cme);
  cme->add_option("--domain", o.domain, "Upper copy-number bound per species");
  cme->add_option("--tol", o.tol, "Scaled residual tolerance");
  cme->add_option("--solver", o.solver, "auto, direct or aggregation");
  cme->add_option("--lattice", o.lattice_out, "Also write the lattice distribution");

  auto* experiment = app.add_subcommand("experiment", "Run a figure experiment");
  experiment->add_option("id", o.experiment, "fig1a, fig1b, fig2, fig3, fig4 or custom");
  add_common(experiment);
  experiment->add_option("--config", o.config, "JSON config file");
  experiment->add_option("--network", o.network, "Network file");
  experiment->add_option("--method", o.methods, "Methods to run")->take_all();
  experiment->add_option("--grid", o.grid, "Slow-variable grid MIN:MAX");
  experiment->add_option("--budget", o.budgets, "Budgets per grid point")->take_all();
  experiment->add_option("--sweep", o.sweep, "K or lambda values")->take_all();
  experiment->add_option("--workers", o.workers, "Worker threads (default: MSCALE_WORKERS or 1)");
  experiment->add_option("--replicates", o.replicates, "Independent repetitions per budget");
  experiment->add_flag("--full-sweep", o.full_sweep, "Do not cap budgets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate) return run_validate(o, out);
    if (*simulate_cmd) return run_simulate(o, out);
    if (*estimate) return run_estimate(o, out);
    if (*fpe) return run_solve_fpe(o, out);
    if (*cme) return run_solve_cme(o, out, err);
    if (*experiment) return run_experiment_command(o, out);
  } catch (const Error& e) {
    err << "error: code=" << to_string(e.code()) << " message=\"" << quoted(e.what()) << "\"\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: code=internal message=\"" << quoted(e.what()) << "\"\n";
    return 1;
  }
  return 2;
}

}  // namespace mscale
