#include "qtsp/bench.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

#include "parallel.hpp"
#include "qtsp/error.hpp"
#include "qtsp/rng.hpp"

namespace qtsp {

const OptimaRegistry& OptimaRegistry::builtin() {
  static const OptimaRegistry registry({
      {"burma14", 3323,
       std::vector<City>{1, 2, 14, 3, 4, 5, 6, 12, 7, 13, 8, 11, 9, 10},
       ProblemKind::kSymmetric, 14, "burma14.tsp"},
      {"ulysses16", 6859,
       std::vector<City>{1, 8, 4, 2, 3, 16, 10, 9, 11, 5, 15, 6, 7, 12, 13, 14},
       ProblemKind::kSymmetric, 16, "ulysses16.tsp"},
      {"gr17", 2085, std::nullopt, ProblemKind::kSymmetric, 17, "gr17.tsp"},
      {"ulysses22", 7013, std::nullopt, ProblemKind::kSymmetric, 22,
       "ulysses22.tsp"},
      {"br17", 39, std::nullopt, ProblemKind::kAsymmetric, 17, "br17.atsp"},
      {"ftv33", 1286, std::nullopt, ProblemKind::kAsymmetric, 34, "ftv33.atsp"},
  });
  return registry;
}

const RegistryEntry* OptimaRegistry::find(std::string_view name) const {
  for (const auto& e : entries_)
    if (e.name == name) return &e;
  return nullptr;
}

const RegistryEntry& OptimaRegistry::at(std::string_view name) const {
  if (const auto* e = find(name)) return *e;
  throw Error(fmt::format("unknown instance '{}'", name));
}

double error_percent(Distance best, Distance optimal) {
  if (optimal <= 0) {
    throw DomainError(
        fmt::format("optimal length must be positive, got {}", optimal));
  }
  return static_cast<double>(best - optimal) / static_cast<double>(optimal) *
         100.0;
}

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kHybrid:
      return "hybrid";
    case SolverKind::kSa:
      return "sa";
    case SolverKind::kTabu:
      return "tabu";
    case SolverKind::kExact:
      return "exact";
  }
  return "?";
}

SolverKind parse_solver(std::string_view name) {
  for (auto k : {SolverKind::kHybrid, SolverKind::kSa, SolverKind::kTabu,
                 SolverKind::kExact})
    if (to_string(k) == name) return k;
  throw ConfigError(fmt::format("unknown solver '{}'", name));
}

namespace {

std::string describe(const SamplerConfig& c) {
  return fmt::format(
      "reads={} sweeps={} beta={} tenure={} steps={} timeout={} restart={}",
      c.num_reads, c.sweeps,
      c.beta_range ? fmt::format("{}:{}", c.beta_range->initial,
                                 c.beta_range->final)
                   : "auto",
      c.tabu_tenure ? std::to_string(*c.tabu_tenure) : "auto", c.tabu_steps,
      c.tabu_timeout.count(), c.tabu_restart_stall);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string SolverOptions::digest() const {
  std::string canon = fmt::format(
      "solver={} gamma={} chain={} runs={} anneal={}", to_string(solver),
      gamma ? fmt::format("{}", *gamma) : "default", tuning.chain_strength,
      tuning.num_runs, tuning.anneal_time);
  if (solver == SolverKind::kHybrid) {
    canon += fmt::format(
        " iters={} patience={} sub={} blocks={}x{} tabu[{}] sa[{}] subsa[{}]",
        hybrid.max_iterations, hybrid.convergence_patience,
        hybrid.subproblem_size ? std::to_string(*hybrid.subproblem_size)
                               : "auto",
        hybrid.tour_blocks, hybrid.tour_block_vars, describe(hybrid.tabu), describe(hybrid.sa), describe(hybrid.subproblem));
  } else if (solver != SolverKind::kExact) {
    canon += " sampler[" + describe(sampler) + "]";
  }
  return fmt::format("{:08x}", fnv1a(canon) & 0xffffffffULL);
}

SolveOutcome solve_instance(const Instance& instance, const SolverOptions& options,
                            std::uint64_t seed) {
  SolveOutcome out;
  if (options.solver == SolverKind::kExact) {
    out.tour = brute_force_tsp(instance);
    return out;
  }

  TuningParams tuning = options.tuning;
  tuning.gamma = options.gamma.value_or(default_gamma(instance));
  out.gamma = tuning.gamma;
  const Qubo qubo = build_qubo(instance, tuning);

  std::vector<Sample> candidates;
  switch (options.solver) {
    case SolverKind::kHybrid: {
      HybridConfig config = options.hybrid;
      config.seed = seed;
      HybridResult result = run_hybrid(qubo, config);
      candidates.push_back(std::move(result.best));
      out.trace = std::move(result.trace);
      break;
    }
    case SolverKind::kSa: {
      SamplerConfig config = options.sampler;
      config.seed = seed;
      candidates = sa_sample(qubo, config).samples;
      break;
    }
    case SolverKind::kTabu: {
      SamplerConfig config = options.sampler;
      config.seed = seed;
      candidates = tabu_sample(qubo, config).samples;
      break;
    }
    case SolverKind::kExact:
      break;
  }

  std::string last_violation;
  for (const Sample& s : candidates) {
    Decoded decoded = decode_sample(qubo, s, instance);
    if (auto* tour = std::get_if<Tour>(&decoded)) {
      if (const auto check = validate_tour(instance, tour->order); !check) {
        last_violation = check.violation;
        continue;
      }
      out.tour = std::move(*tour);
      return out;
    }
    last_violation = std::get<ConstraintReport>(decoded).describe();
  }
  out.failure = "no feasible sample: " + last_violation;
  return out;
}

std::vector<BenchmarkReport> run_benchmark(const std::vector<std::string>& instances,
                                           const SolverOptions& solver,
                                           int repetitions, std::uint64_t seed,
                                           const BenchOptions& options) {
  if (repetitions < 1) throw ConfigError("repetitions must be positive");
  const OptimaRegistry& registry = OptimaRegistry::builtin();

  struct Job {
    const RegistryEntry* entry;
    Instance instance;
  };
  std::vector<Job> jobs;
  for (const auto& name : instances) {
    const RegistryEntry* entry = registry.find(name);
    if (!entry) throw Error(fmt::format("unknown instance '{}'", name));
    const auto path = options.data_dir / entry->file_name;
    if (!std::filesystem::exists(path)) {
      throw Error(fmt::format("instance '{}': file {} not found", name,
                              path.string()));
    }
    jobs.push_back({entry, load_instance(path)});
  }

  const std::string solver_id =
      fmt::format("{}@{}", to_string(solver.solver), solver.digest());
  std::vector<BenchmarkReport> reports;
  for (const Job& job : jobs) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<SolveOutcome> outcomes(repetitions);
    detail::parallel_for(repetitions, options.threads, [&](int rep) {
      try {
        outcomes[rep] = solve_instance(job.instance, solver,
                                       derive_seed(seed, static_cast<std::uint64_t>(rep)));
      } catch (const std::exception& e) {
        outcomes[rep].failure = e.what();
      }
    });

    BenchmarkReport r;
    r.instance = job.entry->name;
    r.solver = solver_id;
    r.seed = seed;
    r.optimal_length = job.entry->optimal_length;
    r.total_runs = repetitions;
    for (int rep = 0; rep < repetitions; ++rep) {
      const SolveOutcome& o = outcomes[rep];
      if (!o.tour) {
        r.failures.push_back(fmt::format("rep {}: {}", rep, o.failure));
        continue;
      }
      ++r.feasible_runs;
      if (!r.best_length || o.tour->length < *r.best_length) {
        r.best_length = o.tour->length;
        r.best_tour = o.tour->order;
      }
    }
    if (r.best_length)
      r.error_percent = error_percent(*r.best_length, r.optimal_length);
    r.wall_time = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    reports.push_back(std::move(r));
  }
  return reports;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "table") return ReportFormat::kTable;
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  throw ConfigError(fmt::format("unknown report format '{}'", name));
}

namespace {

constexpr std::string_view kCsvHeader =
    "instance,optimal,best,error_percent,solver,seed,feasible_runs,total_runs,"
    "wall_ms";

std::string one_decimal(const std::optional<double>& v) {
  return v ? fmt::format("{:.1f}", *v) : std::string();
}

}  // namespace

std::string emit_report(const std::vector<BenchmarkReport>& reports,
                        ReportFormat format, const EmitOptions& options) {
  if (reports.empty()) throw StructuralError("no benchmark reports to emit");
  auto wall = [&](const BenchmarkReport& r) {
    return options.include_timing ? r.wall_time.count() : 0;
  };

  std::string out;
  switch (format) {
    case ReportFormat::kCsv: {
      out = std::string(kCsvHeader) + "\n";
      for (const auto& r : reports) {
        out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.instance,
                           r.optimal_length,
                           r.best_length ? std::to_string(*r.best_length) : "",
                           one_decimal(r.error_percent), r.solver, r.seed,
                           r.feasible_runs, r.total_runs, wall(r));
      }
      break;
    }
    case ReportFormat::kTable: {
      out = fmt::format("{:<12}{:>9}{:>9}{:>9}  {:<18}{:>21}{:>10}{:>10}\n",
                        "instance", "optimal", "best", "error%", "solver", "seed",
                        "feasible", "wall_ms");
      for (const auto& r : reports) {
        out += fmt::format(
            "{:<12}{:>9}{:>9}{:>9}  {:<18}{:>21}{:>10}{:>10}\n", r.instance,
            r.optimal_length,
            r.best_length ? std::to_string(*r.best_length) : "-",
            r.error_percent ? one_decimal(r.error_percent) : "-", r.solver,
            r.seed, fmt::format("{}/{}", r.feasible_runs, r.total_runs),
            wall(r));
      }
      break;
    }
    case ReportFormat::kJson: {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& r : reports) {
        nlohmann::json j;
        j["instance"] = r.instance;
        j["solver"] = r.solver;
        j["seed"] = r.seed;
        j["optimal_length"] = r.optimal_length;
        j["best_length"] = r.best_length ? nlohmann::json(*r.best_length)
                                         : nlohmann::json(nullptr);
        j["error_percent"] = r.error_percent ? nlohmann::json(*r.error_percent)
                                             : nlohmann::json(nullptr);
        j["feasible_runs"] = r.feasible_runs;
        j["total_runs"] = r.total_runs;
        j["wall_ms"] = wall(r);
        j["best_tour"] = to_one_based(r.best_tour);
        j["failures"] = r.failures;
        arr.push_back(std::move(j));
      }
      out = arr.dump(2) + "\n";
      break;
    }
  }
  return out;
}

namespace {

template <typename T>
T parse_field(std::string_view s, std::string_view what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(fmt::format("report CSV: bad {} '{}'", what, s));
  return value;
}

}  // namespace

std::vector<BenchmarkReport> parse_report_csv(std::string_view csv) {
  std::vector<BenchmarkReport> out;
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw ParseError("report CSV: missing or unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 9)
      throw ParseError(fmt::format("report CSV: expected 9 fields: '{}'", line));
    BenchmarkReport r;
    r.instance = std::string(f[0]);
    r.optimal_length = parse_field<Distance>(f[1], "optimal");
    if (!f[2].empty()) r.best_length = parse_field<Distance>(f[2], "best");
    if (!f[3].empty()) r.error_percent = parse_field<double>(f[3], "error_percent");
    r.solver = std::string(f[4]);
    r.seed = parse_field<std::uint64_t>(f[5], "seed");
    r.feasible_runs = parse_field<int>(f[6], "feasible_runs");
    r.total_runs = parse_field<int>(f[7], "total_runs");
    r.wall_time = std::chrono::milliseconds(parse_field<long>(f[8], "wall_ms"));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace qtsp
