#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qtsp/hybrid.hpp"
#include "qtsp/qubo.hpp"
#include "qtsp/samplers.hpp"
#include "qtsp/tsplib.hpp"

namespace qtsp {

struct RegistryEntry {
  std::string name;
  Distance optimal_length = 0;
  // 1-based, as published.
  std::optional<std::vector<City>> optimal_tour;
  ProblemKind kind = ProblemKind::kSymmetric;
  int dimension = 0;
  std::string file_name;
};

// Known optima for the six library instances used in the experiments.
class OptimaRegistry {
 public:
  static const OptimaRegistry& builtin();

  const RegistryEntry* find(std::string_view name) const;
  const RegistryEntry& at(std::string_view name) const;
  const std::vector<RegistryEntry>& entries() const { return entries_; }

 private:
  explicit OptimaRegistry(std::vector<RegistryEntry> entries)
      : entries_(std::move(entries)) {}
  std::vector<RegistryEntry> entries_;
};

// ((best - optimal) / optimal) * 100. A best below the optimum yields a
// negative value; it is not rejected.
double error_percent(Distance best, Distance optimal);

enum class SolverKind { kHybrid, kSa, kTabu, kExact };

std::string_view to_string(SolverKind kind);
SolverKind parse_solver(std::string_view name);

struct SolverOptions {
  SolverKind solver = SolverKind::kHybrid;
  // Unset: default_gamma(instance).
  std::optional<double> gamma;
  TuningParams tuning;
  HybridConfig hybrid;
  // Used by the standalone sa and tabu solvers.
  SamplerConfig sampler;

  // Short hex digest of everything that affects results except the seed.
  std::string digest() const;
};

struct SolveOutcome {
  std::optional<Tour> tour;
  double gamma = 0;
  std::string failure;
  // Hybrid solver only.
  std::vector<TraceRecord> trace;
};

// One run of the chosen solver; every returned tour has passed validate_tour.
SolveOutcome solve_instance(const Instance& instance, const SolverOptions& options,
                            std::uint64_t seed);

struct BenchmarkReport {
  std::string instance;
  std::string solver;  // "<name>@<digest>"
  std::uint64_t seed = 0;
  std::optional<Distance> best_length;
  Distance optimal_length = 0;
  std::optional<double> error_percent;
  int feasible_runs = 0;
  int total_runs = 0;
  std::chrono::milliseconds wall_time{0};
  std::vector<City> best_tour;  // 0-based
  std::vector<std::string> failures;
};

struct BenchOptions {
  std::filesystem::path data_dir = "data/tsplib";
  int threads = 1;
};

// Fails up front on names missing from the registry or data directory;
// per-run solver failures are recorded in the report instead.
std::vector<BenchmarkReport> run_benchmark(const std::vector<std::string>& instances,
                                           const SolverOptions& solver,
                                           int repetitions, std::uint64_t seed,
                                           const BenchOptions& options = {});

enum class ReportFormat { kTable, kCsv, kJson };

ReportFormat parse_report_format(std::string_view name);

struct EmitOptions {
  // When false, wall times are written as 0 so identical runs produce
  // identical bytes.
  bool include_timing = true;
};

std::string emit_report(const std::vector<BenchmarkReport>& reports,
                        ReportFormat format, const EmitOptions& options = {});

// Reads back the CSV written by emit_report (numeric and identity columns).
std::vector<BenchmarkReport> parse_report_csv(std::string_view csv);

}  // namespace qtsp
