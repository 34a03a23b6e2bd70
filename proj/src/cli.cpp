#include "qtsp/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "qtsp/annealsim.hpp"
#include "qtsp/bench.hpp"
#include "qtsp/error.hpp"
#include "qtsp/hybrid.hpp"
#include "qtsp/qubo.hpp"
#include "qtsp/tsplib.hpp"

namespace qtsp {

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kDefaultSeed = 20240101;

struct CliConfig {
  std::vector<std::string> instances;
  std::string solver = "hybrid";
  std::optional<double> gamma;
  std::uint64_t seed = kDefaultSeed;
  int reps = 6;
  std::optional<int> iterations;
  std::optional<int> patience;
  std::optional<int> num_reads;
  std::optional<int> subproblem_size;
  std::optional<long> tabu_steps;
  std::optional<int> sweeps;
  std::optional<int> tour_blocks;
  std::optional<int> tour_block_vars;
  std::vector<double> anneal_T = {1, 10, 100};
  int steps = 1;
  std::string format = "table";
  std::string out_path;
  std::string trace_path;
  std::string data_dir = "data/tsplib";
  bool reproducible = false;
  bool concurrent = false;
  int threads = 1;
};

std::string strip_suffix(std::string name) {
  for (std::string_view ext : {".tsp", ".atsp"}) {
    if (name.size() > ext.size() && name.ends_with(ext)) {
      name.resize(name.size() - ext.size());
      break;
    }
  }
  return name;
}

// A path if one exists, otherwise a registry name looked up in the data dir.
fs::path resolve_instance(const std::string& arg, const CliConfig& cfg) {
  if (fs::exists(arg)) return arg;
  if (const RegistryEntry* e = OptimaRegistry::builtin().find(arg)) {
    return fs::path(cfg.data_dir) / e->file_name;
  }
  return arg;
}

Instance load_single(const CliConfig& cfg) {
  if (cfg.instances.size() != 1)
    throw ConfigError("exactly one --instance is required");
  return load_instance(resolve_instance(cfg.instances.front(), cfg));
}

SolverOptions solver_options(const CliConfig& cfg) {
  SolverOptions o;
  o.solver = parse_solver(cfg.solver);
  if (cfg.gamma) {
    if (!(*cfg.gamma > 0)) throw ConfigError("--gamma must be positive");
    o.gamma = cfg.gamma;
  }
  if (cfg.iterations) o.hybrid.max_iterations = *cfg.iterations;
  if (cfg.patience) o.hybrid.convergence_patience = *cfg.patience;
  if (cfg.subproblem_size) o.hybrid.subproblem_size = cfg.subproblem_size;
  if (cfg.tabu_steps) {
    o.hybrid.tabu.tabu_steps = *cfg.tabu_steps;
    o.sampler.tabu_steps = *cfg.tabu_steps;
  }
  if (cfg.sweeps) {
    o.hybrid.sa.sweeps = *cfg.sweeps;
    o.sampler.sweeps = *cfg.sweeps;
  }
  if (cfg.tour_blocks) o.hybrid.tour_blocks = *cfg.tour_blocks;
  if (cfg.tour_block_vars) o.hybrid.tour_block_vars = *cfg.tour_block_vars;
  if (cfg.num_reads) {
    o.sampler.num_reads = *cfg.num_reads;
    o.tuning.num_runs = *cfg.num_reads;
  }
  o.hybrid.concurrent_branches = cfg.concurrent;
  o.sampler.threads = cfg.threads;
  o.tuning.validate();
  return o;
}

// Sends output to --out when given, else to the terminal stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error("cannot open output file: " + path);
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

int cmd_info(const CliConfig& cfg, std::ostream& out) {
  const Instance inst = load_single(cfg);
  out << fmt::format("name: {}\nkind: {}\nweight_type: {}\ndimension: {}\n",
                     inst.name, to_string(inst.kind), to_string(inst.weight_type),
                     inst.dimension());
  out << fmt::format("max_distance: {}\nmin_distance: {}\n",
                     inst.distances.max_off_diagonal(),
                     inst.distances.min_off_diagonal());
  out << fmt::format("default_gamma: {}\n", default_gamma(inst));
  return kExitOk;
}

int cmd_solve(const CliConfig& cfg, std::ostream& terminal, std::ostream& err) {
  const Instance inst = load_single(cfg);
  const SolverOptions options = solver_options(cfg);
  Sink sink(cfg.out_path, terminal);
  std::ostream& out = sink.get();

  const double gamma = options.gamma.value_or(default_gamma(inst));
  out << fmt::format("# instance={} solver={}@{} seed={}", inst.name,
                     to_string(options.solver), options.digest(), cfg.seed);
  if (options.solver != SolverKind::kExact) out << fmt::format(" gamma={}", gamma);
  out << '\n';

  const SolveOutcome outcome = solve_instance(inst, options, cfg.seed);
  if (!cfg.trace_path.empty()) {
    std::ofstream trace(cfg.trace_path, std::ios::binary);
    if (!trace) throw Error("cannot open trace file: " + cfg.trace_path);
    write_trace(outcome.trace, trace);
  }
  if (!outcome.tour) {
    out << "infeasible: " << outcome.failure << '\n';
    err << "error: no feasible tour found (" << outcome.failure << ")\n";
    return kExitInfeasible;
  }
  out << "tour: " << format_tour(outcome.tour->order) << '\n';
  out << "length: " << outcome.tour->length << '\n';
  if (const RegistryEntry* e = OptimaRegistry::builtin().find(strip_suffix(inst.name));
      e && e->dimension == inst.dimension()) {
    out << fmt::format("optimal: {}\nerror_percent: {:.1f}\n", e->optimal_length,
                       error_percent(outcome.tour->length, e->optimal_length));
  }
  return kExitOk;
}

int cmd_bench(const CliConfig& cfg, std::ostream& terminal) {
  std::vector<std::string> names = cfg.instances;
  if (names.empty() || (names.size() == 1 && names.front() == "all")) {
    names.clear();
    for (const auto& e : OptimaRegistry::builtin().entries()) names.push_back(e.name);
  }
  const SolverOptions options = solver_options(cfg);
  BenchOptions bench;
  bench.data_dir = cfg.data_dir;
  bench.threads = cfg.threads;
  const auto reports = run_benchmark(names, options, cfg.reps, cfg.seed, bench);

  Sink sink(cfg.out_path, terminal);
  sink.get() << emit_report(reports, parse_report_format(cfg.format),
                            EmitOptions{.include_timing = !cfg.reproducible});
  return kExitOk;
}

int cmd_anneal(const CliConfig& cfg, std::ostream& terminal) {
  const Instance inst = load_single(cfg);
  TuningParams tuning;
  tuning.gamma = cfg.gamma.value_or(default_gamma(inst));
  if (!(tuning.gamma > 0)) throw ConfigError("--gamma must be positive");
  const IsingModel model = qubo_to_ising(build_qubo(inst, tuning));

  Sink sink(cfg.out_path, terminal);
  std::ostream& out = sink.get();
  out << fmt::format("# instance={} spins={} gamma={} seed={}\n", inst.name,
                     model.num_spins, tuning.gamma, cfg.seed);
  out << "T,success_probability,norm_error\n";
  for (double T : cfg.anneal_T) {
    AnnealSchedule schedule;
    schedule.total_time = T;
    schedule.num_steps = cfg.steps;
    const AnnealResult r = evolve(model, schedule);
    out << fmt::format("{},{:.9f},{:.3e}\n", T, r.success_probability, r.norm_error);
  }
  return kExitOk;
}

int cmd_qubo_dump(const CliConfig& cfg, std::ostream& terminal) {
  const Instance inst = load_single(cfg);
  TuningParams tuning;
  tuning.gamma = cfg.gamma.value_or(default_gamma(inst));
  if (!(tuning.gamma > 0)) throw ConfigError("--gamma must be positive");
  Sink sink(cfg.out_path, terminal);
  write_qubo_text(build_qubo(inst, tuning), sink.get());
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  CLI::App app{"QUBO formulation and hybrid solving of TSPLIB instances"};
  app.set_config("--config", "", "key=value configuration file; flags override it");
  app.require_subcommand(1);

  app.add_option("--instance", cfg.instances, "TSPLIB file or registry name");
  app.add_option("--solver", cfg.solver, "hybrid, sa, tabu or exact")
      ->check(CLI::IsMember({"hybrid", "sa", "tabu", "exact"}));
  app.add_option("--gamma", cfg.gamma, "Penalty weight (default N*max/2)");
  app.add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  app.add_option("--reps", cfg.reps, "Repetitions per instance")
      ->check(CLI::PositiveNumber);
  app.add_option("--iterations", cfg.iterations, "Hybrid iteration cap");
  app.add_option("--patience", cfg.patience, "Hybrid iterations without improvement");
  app.add_option("--num-reads", cfg.num_reads, "Reads for the sa and tabu solvers");
  app.add_option("--subproblem-size", cfg.subproblem_size, "Hybrid subproblem size");
  app.add_option("--tabu-steps", cfg.tabu_steps, "Tabu step budget");
  app.add_option("--sweeps", cfg.sweeps, "SA sweeps per read");
  app.add_option("--tour-blocks", cfg.tour_blocks, "Exact tour-block solves per iteration");
  app.add_option("--tour-block-vars", cfg.tour_block_vars, "Variables per tour block");
  app.add_option("--anneal-T", cfg.anneal_T, "Anneal times to sweep")->delimiter(',');
  app.add_option("--steps", cfg.steps, "Minimum propagation steps");
  app.add_option("--format", cfg.format, "table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}));
  app.add_option("--out", cfg.out_path, "Output file");
  app.add_option("--trace", cfg.trace_path, "Hybrid trace output file");
  app.add_option("--data-dir", cfg.data_dir, "Directory holding registry instances");
  app.add_flag("--reproducible", cfg.reproducible, "Write wall times as 0");
  app.add_flag("--concurrent-branches", cfg.concurrent,
               "Run hybrid branches on separate threads");
  app.add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* info = app.add_subcommand("info", "Summarize an instance");
  auto* solve = app.add_subcommand("solve", "Solve one instance");
  auto* bench = app.add_subcommand("bench", "Benchmark registry instances");
  auto* anneal = app.add_subcommand("anneal-sim", "Closed-system anneal sweep over T");
  auto* dump = app.add_subcommand("qubo-dump", "Write the QUBO of an instance");
  for (auto* sub : {info, solve, bench, anneal, dump}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*info) return cmd_info(cfg, out);
    if (*solve) return cmd_solve(cfg, out, err);
    if (*bench) return cmd_bench(cfg, out);
    if (*anneal) return cmd_anneal(cfg, out);
    if (*dump) return cmd_qubo_dump(cfg, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const StructuralError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const UnsupportedFeature& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const SizeError& e) {
    err << "size error: " << e.what() << '\n';
    return kExitSizeBound;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace qtsp
