// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracles.hpp"
#include "qtsp/annealsim.hpp"
#include "qtsp/bench.hpp"
#include "qtsp/hybrid.hpp"
#include "qtsp/qubo.hpp"
#include "qtsp/samplers.hpp"
#include "qtsp/tsplib.hpp"

using namespace qtsp;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, std::string note) {
    if (!ok) pass = false;
    notes.push_back((ok ? "" : "!") + std::move(note));
  }
};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

fs::path data_dir() {
  if (const char* env = std::getenv("QTSP_DATA_DIR")) return env;
  return QTSP_DATA_DIR;
}

Qubo default_qubo(const Instance& inst) {
  TuningParams p;
  p.gamma = default_gamma(inst);
  return build_qubo(inst, p);
}

std::string round1(double v) { return fmt::format("{:.1f}", v); }

Verdict parser_geo() {
  Verdict v;
  const auto t0 = Clock::now();
  const Instance b14 = load_instance(data_dir() / "burma14.tsp");
  const Instance u16 = load_instance(data_dir() / "ulysses16.tsp");
  const auto b = tour_length(b14, from_one_based(std::vector<City>{
                                      1, 2, 14, 3, 4, 5, 6, 12, 7, 13, 8, 11, 9, 10}));
  const auto u = tour_length(u16, from_one_based(std::vector<City>{
                                      1, 8, 4, 2, 3, 16, 10, 9, 11, 5, 15, 6, 7, 12, 13, 14}));
  const double secs = seconds_since(t0);
  v.check(b == 3323, fmt::format("burma14={}", b));
  v.check(u == 6859, fmt::format("ulysses16={}", u));
  v.check(secs < 1.0, fmt::format("{:.3f}s", secs));
  return v;
}

Verdict gamma_defaults() {
  Verdict v;
  const Instance br17 = load_instance(data_dir() / "br17.atsp");
  const Instance u22 = load_instance(data_dir() / "ulysses22.tsp");
  v.check(default_gamma(br17) == 629, fmt::format("br17={}", default_gamma(br17)));
  v.check(default_gamma(u22) == 30679, fmt::format("ulysses22={}", default_gamma(u22)));
  const fs::path ftv33 = data_dir() / "ftv33.atsp";
  if (fs::exists(ftv33)) {
    const double g = default_gamma(load_instance(ftv33));
    v.check(g == 5644, fmt::format("ftv33={}", g));
  } else {
    v.check(false, "ftv33 file missing: " + ftv33.string());
  }
  return v;
}

Verdict qubo_oracle() {
  Verdict v;
  const auto t0 = Clock::now();
  std::mt19937_64 gen(20240301);
  int agree = 0, clean = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = trial % 2 ? 5 : 4;
    const Instance inst = oracle::random_instance(n, gen, trial % 4 < 2);
    const Qubo q = default_qubo(inst);
    const Distance opt = brute_force_tsp(inst).length;
    const int m = q.num_vars();
    double lo = std::numeric_limits<double>::infinity();
    std::vector<uint64_t> argmins;
    for (uint64_t z = 0; z < (uint64_t{1} << m); ++z) {
      const double e = oracle::naive_energy(q, oracle::bits_of(z, m));
      if (e < lo) {
        lo = e;
        argmins = {z};
      } else if (e == lo) {
        argmins.push_back(z);
      }
    }
    if (lo == static_cast<double>(opt)) ++agree;
    bool only_optimal = true;
    for (uint64_t z : argmins) {
      const Decoded d = decode_sample(q, Sample{oracle::bits_of(z, m), lo, 1}, inst);
      const Tour* t = std::get_if<Tour>(&d);
      if (!t || t->length != opt || !validate_tour(inst, t->order)) only_optimal = false;
    }
    if (only_optimal) ++clean;
  }
  const double secs = seconds_since(t0);
  v.check(agree == 20, fmt::format("min=opt {}/20", agree));
  v.check(clean == 20, fmt::format("argmins optimal {}/20", clean));
  v.check(secs < 60, fmt::format("{:.1f}s", secs));
  return v;
}

Verdict feasible_identity() {
  Verdict v;
  std::mt19937_64 gen(20240302);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + trial % 6;
    const Instance inst = oracle::random_instance(n, gen, trial % 2 == 0, 0, 10000);
    const Qubo q = default_qubo(inst);
    std::vector<City> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin() + 1, order.end(), gen);
    const double len = static_cast<double>(tour_length(inst, order));
    const double e = qubo_energy(q, encode_tour(q, Tour{order, 0}).bits);
    worst = std::max(worst, std::abs(e - len) / std::max(1.0, std::abs(len)));
  }
  v.check(worst <= 1e-9, fmt::format("max rel err {:.2e}", worst));
  return v;
}

Verdict hybrid_budgets() {
  Verdict v;
  struct Budget {
    const char* name;
    double ceiling;
  };
  const Budget budgets[] = {{"burma14", 6.7}, {"ulysses16", 6.6}, {"gr17", 13.9},
                            {"ulysses22", 16.5}, {"br17", 2.6}, {"ftv33", 54.5}};
  BenchOptions bo;
  bo.data_dir = data_dir();
  for (const Budget& b : budgets) {
    const auto t0 = Clock::now();
    try {
      const auto reports = run_benchmark({b.name}, SolverOptions{}, 6, 20240303, bo);
      const double secs = seconds_since(t0);
      const BenchmarkReport& r = reports.front();
      const bool ok = r.error_percent && *r.error_percent <= b.ceiling && secs <= 120;
      v.check(ok, fmt::format("{} best={} err={}% (<= {}) {:.1f}s", b.name,
                              r.best_length ? std::to_string(*r.best_length) : "none",
                              r.error_percent ? round1(*r.error_percent) : "-", b.ceiling,
                              secs));
    } catch (const std::exception& e) {
      v.check(false, fmt::format("{}: {}", b.name, e.what()));
    }
  }
  return v;
}

Verdict error_percent_formula() {
  Verdict v;
  const double a = error_percent(3545, 3323);
  const double b = error_percent(2374, 2085);
  const double c = error_percent(1987, 1286);
  v.check(round1(a) == "6.7", "burma14 " + round1(a));
  v.check(round1(b) == "13.9", "gr17 " + round1(b));
  v.check(fmt::format("{:.2f}", b) == "13.86", fmt::format("gr17 {:.2f}", b));
  v.check(round1(c) == "54.5", "ftv33 " + round1(c));
  return v;
}

Verdict hybrid_determinism() {
  Verdict v;
  std::mt19937_64 gen(20240304);
  std::vector<Qubo> qubos;
  for (int t = 0; t < 6; ++t)
    qubos.push_back(default_qubo(oracle::random_instance(4 + t, gen, t % 2 == 0)));
  qubos.push_back(default_qubo(load_instance(data_dir() / "burma14.tsp")));
  qubos.push_back(default_qubo(load_instance(data_dir() / "br17.atsp")));

  int monotone = 0, identical = 0;
  for (size_t i = 0; i < qubos.size(); ++i) {
    HybridConfig c;
    c.seed = 500 + i;
    c.max_iterations = 12;
    const HybridResult a = run_hybrid(qubos[i], c);
    const HybridResult b = run_hybrid(qubos[i], c);
    c.concurrent_branches = true;
    const HybridResult p = run_hybrid(qubos[i], c);

    bool mono = true;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& r : a.trace) {
      if (r.branch != Branch::kIncumbent) continue;
      if (r.energy > prev) mono = false;
      prev = r.energy;
    }
    monotone += mono;
    std::ostringstream ta, tb, tp;
    write_trace(a.trace, ta);
    write_trace(b.trace, tb);
    write_trace(p.trace, tp);
    identical += ta.str() == tb.str() && ta.str() == tp.str() && a.best == p.best;
  }
  const int n = static_cast<int>(qubos.size());
  v.check(monotone == n, fmt::format("monotone {}/{}", monotone, n));
  v.check(identical == n, fmt::format("identical traces {}/{}", identical, n));
  return v;
}

Verdict anneal_properties() {
  Verdict v;
  const auto t0 = Clock::now();
  const Instance tri = oracle::matrix_instance({{0, 3, 5}, {3, 0, 4}, {5, 4, 0}}, true);
  std::vector<IsingModel> models{qubo_to_ising(default_qubo(tri))};
  std::mt19937_64 gen(20240305);
  std::uniform_real_distribution<double> c(-1, 1);
  for (int t = 0; t < 10; ++t) {
    IsingModel m;
    m.num_spins = 2 + t % 5;
    for (int i = 0; i < m.num_spins; ++i) m.h.push_back(c(gen));
    for (int i = 0; i < m.num_spins; ++i)
      for (int j = i + 1; j < m.num_spins; ++j) m.J[{i, j}] = c(gen);
    models.push_back(std::move(m));
  }

  double worst_norm = 0;
  int trend_ok = 0, endpoints_ok = 0, endpoints_checked = 0;
  for (const auto& m : models) {
    std::vector<double> p;
    for (double T : {1.0, 10.0, 100.0}) {
      AnnealSchedule s;
      s.total_time = T;
      const AnnealResult r = evolve(m, s);
      worst_norm = std::max(worst_norm, r.norm_error);
      p.push_back(r.success_probability);
    }
    bool ok = true;
    for (size_t k = 1; k < p.size(); ++k)
      if (p[k] < p[k - 1] - 0.01) ok = false;
    trend_ok += ok;

    if (m.num_spins <= 4) {
      ++endpoints_checked;
      const Eigen::MatrixXcd h0 = hamiltonian_matrix(m, 0.0);
      const Eigen::MatrixXcd h1 = hamiltonian_matrix(m, 1.0);
      const int dim = 1 << m.num_spins;
      bool exact = true;
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
          const int d = a ^ b;
          const bool flip = d != 0 && (d & (d - 1)) == 0;
          if (h0(a, b) != std::complex<double>(flip ? -1.0 : 0.0, 0.0)) exact = false;
          const double want = a == b ? m.basis_energy(static_cast<uint32_t>(a)) : 0.0;
          if (h1(a, b) != std::complex<double>(want, 0.0)) exact = false;
        }
      endpoints_ok += exact;
    }
  }
  AnnealSchedule slow;
  slow.total_time = 1000;
  const double p_large = evolve(models.front(), slow).success_probability;
  const double secs = seconds_since(t0);

  const int n = static_cast<int>(models.size());
  v.check(worst_norm <= 1e-6, fmt::format("norm err {:.1e}", worst_norm));
  v.check(endpoints_ok == endpoints_checked,
          fmt::format("endpoints {}/{}", endpoints_ok, endpoints_checked));
  v.check(trend_ok == n, fmt::format("trend {}/{}", trend_ok, n));
  v.check(p_large >= 0.9, fmt::format("3-city T=1000 p={:.4f}", p_large));
  v.check(secs < 60, fmt::format("{:.1f}s", secs));
  return v;
}

Verdict size_trend() {
  Verdict v;
  SolverOptions o;
  o.hybrid.max_iterations = 10;
  BenchOptions bo;
  bo.data_dir = data_dir();
  const std::vector<std::string> names{"burma14", "ulysses16", "gr17", "ulysses22"};
  const auto reports = run_benchmark(names, o, 1, 20240306, bo);
  std::vector<double> err;
  for (const auto& r : reports) err.push_back(r.error_percent.value_or(1e9));
  int inversions = 0;
  for (size_t k = 1; k < err.size(); ++k)
    if (err[k] < err[k - 1]) ++inversions;
  std::string seq;
  for (size_t k = 0; k < err.size(); ++k)
    seq += fmt::format("{}{}={:.1f}", k ? " " : "", names[k], err[k]);
  v.check(inversions <= 1, fmt::format("{} inversions={}", seq, inversions));
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<Verdict()> run;
  };
  const Criterion criteria[] = {
      {1, "parser + GEO exactness", parser_geo},
      {2, "gamma defaults", gamma_defaults},
      {3, "QUBO exhaustive oracle", qubo_oracle},
      {4, "feasible-energy identity", feasible_identity},
      {5, "hybrid match-or-beat budgets", hybrid_budgets},
      {6, "error percent formula", error_percent_formula},
      {7, "hybrid monotonicity + determinism", hybrid_determinism},
      {8, "anneal simulator properties", anneal_properties},
      {9, "size-trend regression guard", size_trend},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    std::string notes;
    for (const auto& n : v.notes) notes += (notes.empty() ? "" : "; ") + n;
    std::cout << fmt::format("{} [{}] {}: {}\n", v.pass ? "PASS" : "FAIL", c.id, c.title,
                             notes)
              << std::flush;
    failed += !v.pass;
  }
  std::cout << fmt::format("{} of {} criteria passed\n", 9 - failed, 9);
  return failed == 0 ? 0 : 1;
}
