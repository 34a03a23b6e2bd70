#include <cmath>

#include <gtest/gtest.h>

#include "json.hpp"
#include "oracles.hpp"
#include "qtsp/bench.hpp"
#include "qtsp/error.hpp"

using namespace qtsp;

namespace {

const std::string kData = QTSP_DATA_DIR;

SolverOptions quick_hybrid() {
  SolverOptions o;
  o.hybrid.max_iterations = 5;
  o.hybrid.convergence_patience = 3;
  o.hybrid.tabu.tabu_steps = 3000;
  o.hybrid.sa.num_reads = 10;
  o.hybrid.sa.sweeps = 200;
  return o;
}

BenchmarkReport sample_report() {
  BenchmarkReport r;
  r.instance = "burma14";
  r.solver = "hybrid@deadbeef";
  r.seed = 12345678901234ULL;
  r.optimal_length = 3323;
  r.best_length = 3545;
  r.error_percent = error_percent(3545, 3323);
  r.feasible_runs = 5;
  r.total_runs = 6;
  r.wall_time = std::chrono::milliseconds(987);
  return r;
}

}  // namespace

TEST(ErrorPercent, PublishedValues) {
  EXPECT_NEAR(error_percent(3545, 3323), 6.68, 0.005);
  EXPECT_NEAR(error_percent(2374, 2085), 13.86, 0.005);
  EXPECT_NEAR(error_percent(1987, 1286), 54.51, 0.005);
  EXPECT_EQ(error_percent(7013, 7013), 0.0);
  EXPECT_LT(error_percent(38, 39), 0.0);
  EXPECT_THROW(error_percent(10, 0), DomainError);
  EXPECT_THROW(error_percent(10, -3), DomainError);
}

TEST(ErrorPercent, StrictlyIncreasingInBest) {
  for (Distance b = 3323; b < 3400; ++b)
    EXPECT_LT(error_percent(b, 3323), error_percent(b + 1, 3323));
}

TEST(Registry, StoredToursEvaluateToStoredLengths) {
  const auto& reg = OptimaRegistry::builtin();
  EXPECT_EQ(reg.entries().size(), 6u);
  int checked = 0;
  for (const auto& e : reg.entries()) {
    if (!e.optimal_tour) continue;
    const Instance inst = load_instance(kData + "/" + e.file_name);
    EXPECT_EQ(inst.dimension(), e.dimension);
    EXPECT_EQ(tour_length(inst, from_one_based(*e.optimal_tour)), e.optimal_length);
    ++checked;
  }
  EXPECT_EQ(checked, 2);
  EXPECT_EQ(reg.at("gr17").optimal_length, 2085);
  EXPECT_EQ(reg.at("ulysses22").optimal_length, 7013);
  EXPECT_EQ(reg.at("br17").optimal_length, 39);
  EXPECT_EQ(reg.at("ftv33").optimal_length, 1286);
  EXPECT_EQ(reg.at("ftv33").dimension, 34);
  EXPECT_EQ(reg.find("nope"), nullptr);
}

TEST(Solver, Names) {
  for (auto k : {SolverKind::kHybrid, SolverKind::kSa, SolverKind::kTabu, SolverKind::kExact})
    EXPECT_EQ(parse_solver(to_string(k)), k);
  EXPECT_THROW(parse_solver("qpu"), Error);
}

TEST(Solver, DigestTracksSettings) {
  SolverOptions a, b;
  EXPECT_EQ(a.digest(), b.digest());
  EXPECT_EQ(a.digest().size(), 8u);
  b.hybrid.max_iterations = 7;
  EXPECT_NE(a.digest(), b.digest());
  b = a;
  b.gamma = 100;
  EXPECT_NE(a.digest(), b.digest());
}

TEST(SolveInstance, EveryFamilyReturnsValidatedTours) {
  std::mt19937_64 gen(50);
  const Instance inst = oracle::random_instance(6, gen, false);
  const Distance opt = oracle::held_karp(inst);
  for (auto kind : {SolverKind::kHybrid, SolverKind::kSa, SolverKind::kTabu, SolverKind::kExact}) {
    SolverOptions o = quick_hybrid();
    o.solver = kind;
    const SolveOutcome out = solve_instance(inst, o, 9);
    ASSERT_TRUE(out.tour) << to_string(kind) << ": " << out.failure;
    EXPECT_TRUE(validate_tour(inst, out.tour->order));
    EXPECT_EQ(tour_length(inst, out.tour->order), out.tour->length);
    EXPECT_GE(out.tour->length, opt);
    if (kind == SolverKind::kExact) EXPECT_EQ(out.tour->length, opt);
  }
}

TEST(SolveInstance, TinyGammaReportsInfeasible) {
  std::mt19937_64 gen(51);
  const Instance inst = oracle::random_instance(5, gen, true, 50, 100);
  SolverOptions o;
  o.solver = SolverKind::kTabu;
  o.gamma = 1e-3;
  o.sampler.tabu_steps = 500;
  const SolveOutcome out = solve_instance(inst, o, 1);
  EXPECT_FALSE(out.tour);
  EXPECT_FALSE(out.failure.empty());
}

TEST(RunBenchmark, ErrorsUpFront) {
  BenchOptions bo;
  bo.data_dir = kData;
  try {
    run_benchmark({"burma14", "nosuch"}, quick_hybrid(), 1, 1, bo);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("nosuch"), std::string::npos);
  }
  bo.data_dir = "/nonexistent";
  EXPECT_THROW(run_benchmark({"burma14"}, quick_hybrid(), 1, 1, bo), Error);
  EXPECT_THROW(run_benchmark({"burma14"}, quick_hybrid(), 0, 1, BenchOptions{kData}), Error);
}

TEST(RunBenchmark, ReproducibleAndThreadInvariant) {
  BenchOptions bo;
  bo.data_dir = kData;
  const auto a = run_benchmark({"burma14", "br17"}, quick_hybrid(), 3, 99, bo);
  bo.threads = 3;
  const auto b = run_benchmark({"burma14", "br17"}, quick_hybrid(), 3, 99, bo);
  const EmitOptions fixed{.include_timing = false};
  EXPECT_EQ(emit_report(a, ReportFormat::kCsv, fixed), emit_report(b, ReportFormat::kCsv, fixed));
  ASSERT_EQ(a.size(), 2u);
  for (const auto& r : a) {
    EXPECT_EQ(r.total_runs, 3);
    ASSERT_TRUE(r.best_length);
    const Instance inst =
        load_instance(kData + "/" + OptimaRegistry::builtin().at(r.instance).file_name);
    EXPECT_TRUE(validate_tour(inst, r.best_tour));
    EXPECT_EQ(tour_length(inst, r.best_tour), *r.best_length);
    EXPECT_DOUBLE_EQ(*r.error_percent, error_percent(*r.best_length, r.optimal_length));
  }
}

TEST(SolveInstance, ExactSolverHitsOptimum) {
  std::mt19937_64 gen(52);
  const Instance inst = oracle::random_instance(9, gen, true);
  SolverOptions o;
  o.solver = SolverKind::kExact;
  const SolveOutcome out = solve_instance(inst, o, 0);
  ASSERT_TRUE(out.tour);
  EXPECT_EQ(error_percent(out.tour->length, oracle::held_karp(inst)), 0.0);
}

TEST(EmitReport, Formats) {
  const std::vector<BenchmarkReport> rs{sample_report()};
  const std::string csv = emit_report(rs, ReportFormat::kCsv);
  EXPECT_EQ(csv,
            "instance,optimal,best,error_percent,solver,seed,feasible_runs,total_runs,wall_ms\n"
            "burma14,3323,3545,6.7,hybrid@deadbeef,12345678901234,5,6,987\n");
  EXPECT_NE(emit_report(rs, ReportFormat::kTable).find(" 6.7 "), std::string::npos);
  const auto j = nlohmann::json::parse(emit_report(rs, ReportFormat::kJson));
  EXPECT_DOUBLE_EQ(j[0]["error_percent"].get<double>(), *rs[0].error_percent);
  EXPECT_EQ(j[0]["seed"].get<std::uint64_t>(), 12345678901234ULL);
  EXPECT_THROW(emit_report({}, ReportFormat::kCsv), StructuralError);
  EXPECT_NE(emit_report(rs, ReportFormat::kCsv, {.include_timing = false}).find(",0\n"),
            std::string::npos);
}

TEST(EmitReport, CsvRoundTrip) {
  BenchmarkReport none = sample_report();
  none.instance = "ulysses22";
  none.best_length.reset();
  none.error_percent.reset();
  none.feasible_runs = 0;
  const std::vector<BenchmarkReport> rs{sample_report(), none};
  const auto back = parse_report_csv(emit_report(rs, ReportFormat::kCsv));
  ASSERT_EQ(back.size(), 2u);
  for (size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].instance, rs[i].instance);
    EXPECT_EQ(back[i].optimal_length, rs[i].optimal_length);
    EXPECT_EQ(back[i].best_length, rs[i].best_length);
    EXPECT_EQ(back[i].solver, rs[i].solver);
    EXPECT_EQ(back[i].seed, rs[i].seed);
    EXPECT_EQ(back[i].feasible_runs, rs[i].feasible_runs);
    EXPECT_EQ(back[i].total_runs, rs[i].total_runs);
    EXPECT_EQ(back[i].wall_time, rs[i].wall_time);
    EXPECT_EQ(back[i].error_percent.has_value(), rs[i].error_percent.has_value());
  }
  EXPECT_DOUBLE_EQ(*back[0].error_percent, 6.7);
}
