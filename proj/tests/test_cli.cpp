#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "qtsp/cli.hpp"
#include "qtsp/qubo.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kData = QTSP_DATA_DIR;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qtsp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = qtsp::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name, const std::string& contents) {
  const fs::path p = fs::path(::testing::TempDir()) / name;
  std::ofstream(p, std::ios::binary) << contents;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const char* kRing4 =
    "NAME: ring4\nTYPE: ATSP\nDIMENSION: 4\nEDGE_WEIGHT_TYPE: EXPLICIT\n"
    "EDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n"
    "0 1 10 10\n10 0 1 10\n10 10 0 1\n1 10 10 0\nEOF\n";

const char* kTri =
    "NAME: tri\nTYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\n"
    "EDGE_WEIGHT_FORMAT: UPPER_ROW\nEDGE_WEIGHT_SECTION\n3 5 4\nEOF\n";

}  // namespace

TEST(Cli, InfoReportsDistanceExtremes) {
  struct Case {
    const char* file;
    const char* max;
    const char* min;
  };
  for (const Case& c : {Case{"ulysses16.tsp", "2789", "52"}, Case{"gr17.tsp", "745", "27"},
                        Case{"ulysses22.tsp", "2789", "14"}}) {
    const CliRun r = cli({"info", "--instance", kData + "/" + c.file});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find(std::string("max_distance: ") + c.max + "\n"), std::string::npos);
    EXPECT_NE(r.out.find(std::string("min_distance: ") + c.min + "\n"), std::string::npos);
  }
}

TEST(Cli, RegistryNameResolvesThroughDataDir) {
  const CliRun r = cli({"info", "--instance", "burma14", "--data-dir", kData});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("dimension: 14"), std::string::npos);
}

TEST(Cli, ExactRejectsLargeInstance) {
  const CliRun r = cli({"solve", "--instance", kData + "/burma14.tsp", "--solver", "exact"});
  EXPECT_EQ(r.code, qtsp::kExitSizeBound);
  EXPECT_NE(r.err.find("11"), std::string::npos);
}

TEST(Cli, HybridSolvesDirectedRing) {
  const auto path = temp_file("ring4.atsp", kRing4);
  const CliRun r = cli({"solve", "--instance", path.string(), "--seed", "3"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("tour: 1 2 3 4\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("length: 4\n"), std::string::npos);
  EXPECT_NE(r.out.find("seed=3"), std::string::npos);
}

TEST(Cli, HeaderEchoesGammaAndErrorPercent) {
  const CliRun r = cli({"solve", "--instance", kData + "/ulysses16.tsp", "--iterations", "2"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("gamma=22312"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("seed="), std::string::npos);
  EXPECT_NE(r.out.find("error_percent: "), std::string::npos);
  EXPECT_NE(r.out.find("optimal: 6859"), std::string::npos);
}

TEST(Cli, InfeasibleExitCode) {
  const CliRun r = cli({"solve", "--instance", kData + "/burma14.tsp", "--solver", "tabu",
                     "--gamma", "0.001", "--tabu-steps", "200", "--num-reads", "10"});
  EXPECT_EQ(r.code, qtsp::kExitInfeasible) << r.out << r.err;
  EXPECT_NE(r.out.find("infeasible"), std::string::npos);
}

TEST(Cli, ParseErrorExitCode) {
  const auto path = temp_file("bad.tsp", "NAME: bad\nTYPE: TSP\nDIMENSION x\nEOF\n");
  const CliRun r = cli({"info", "--instance", path.string()});
  EXPECT_EQ(r.code, qtsp::kExitParse);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, qtsp::kExitUsage);
  EXPECT_EQ(cli({"solve", "--solver", "qpu"}).code, qtsp::kExitUsage);
  EXPECT_EQ(cli({"solve", "--instance", kData + "/burma14.tsp", "--gamma", "-1"}).code,
            qtsp::kExitUsage);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(Cli, BenchUnknownInstanceNamed) {
  const CliRun r = cli({"bench", "--instance", "nowhere99", "--data-dir", kData});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("nowhere99"), std::string::npos);
}

TEST(Cli, BenchIsByteIdenticalUnderRepeatedSeed) {
  const fs::path a = fs::path(::testing::TempDir()) / "bench_a.csv";
  const fs::path b = fs::path(::testing::TempDir()) / "bench_b.csv";
  for (const auto& p : {a, b}) {
    const CliRun r = cli({"bench", "--instance", "burma14", "--instance", "br17", "--reps", "2",
                       "--iterations", "3", "--data-dir", kData, "--format", "csv",
                       "--reproducible", "--seed", "17", "--out", p.string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  const std::string text = slurp(a);
  EXPECT_EQ(text, slurp(b));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_NE(text.find(",17,"), std::string::npos);
}

TEST(Cli, ConfigFileOverriddenByFlags) {
  const auto path = temp_file("run.ini", "seed=5\ngamma=40\n");
  const auto inst = temp_file("ring4b.atsp", kRing4);
  const CliRun fromfile = cli({"--config", path.string(), "solve", "--instance", inst.string()});
  EXPECT_EQ(fromfile.code, 0) << fromfile.err;
  EXPECT_NE(fromfile.out.find("seed=5"), std::string::npos) << fromfile.out;
  EXPECT_NE(fromfile.out.find("gamma=40"), std::string::npos);
  const CliRun flags = cli({"--config", path.string(), "solve", "--instance", inst.string(),
                         "--seed", "8"});
  EXPECT_NE(flags.out.find("seed=8"), std::string::npos);
  EXPECT_NE(flags.out.find("gamma=40"), std::string::npos);
}

TEST(Cli, AnnealSweepCsv) {
  const auto path = temp_file("tri.tsp", kTri);
  const CliRun r = cli({"anneal-sim", "--instance", path.string(), "--anneal-T", "1,10,100"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("T,success_probability,norm_error\n"), std::string::npos);
  EXPECT_NE(r.out.find("\n100,"), std::string::npos);
  const CliRun big = cli({"anneal-sim", "--instance", kData + "/burma14.tsp"});
  EXPECT_EQ(big.code, qtsp::kExitSizeBound);
}

TEST(Cli, QuboDumpRoundTrips) {
  const auto path = temp_file("tri2.tsp", kTri);
  const CliRun r = cli({"qubo-dump", "--instance", path.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const qtsp::Qubo q = qtsp::read_qubo_text(in);
  EXPECT_EQ(q.num_vars(), 4);
}
