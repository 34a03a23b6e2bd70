#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qtsp/qubo.hpp"
#include "qtsp/tsplib.hpp"

namespace qtsp {

struct BetaRange {
  double initial = 0;
  double final = 0;
};

struct SamplerConfig {
  std::uint64_t seed = 0;
  int num_reads = 10;
  // Metropolis sweeps per SA read.
  int sweeps = 1000;
  // Unset: 0.1 / max|coefficient| up to 10 / min nonzero |coefficient|.
  std::optional<BetaRange> beta_range;
  // Unset: clamp(n / 4, 1, 20).
  std::optional<int> tabu_tenure;
  // Step budget for one tabu call. The timeout is a safety cap; results are
  // reproducible only while the step budget is what stops the search.
  long tabu_steps = 20000;
  std::chrono::milliseconds tabu_timeout{60000};
  // Consecutive non-improving tabu steps before restarting from a perturbed
  // copy of the best state. 0 disables restarts.
  long tabu_restart_stall = 50;
  // Worker threads for independent reads. Results do not depend on it.
  int threads = 1;

  void validate() const;
};

struct SampleSet {
  // Ascending energy, ties by lexicographic bits. Duplicate assignments are
  // merged into one record with its occurrence count.
  std::vector<Sample> samples;
  std::string sampler;
  std::uint64_t seed = 0;
  std::chrono::nanoseconds wall_time{0};

  const Sample& best() const;
  bool empty() const { return samples.empty(); }
  int total_reads() const;
};

// Builds a SampleSet from raw assignments: energies from qubo_energy,
// duplicates merged, canonical order.
SampleSet make_sample_set(const Qubo& qubo, std::vector<Bits> states,
                          std::string sampler, std::uint64_t seed);

// Anneal-time analog: one schedule time unit per sweep.
int sweeps_for_anneal_time(double anneal_time);

BetaRange default_beta_range(const Qubo& qubo);

SampleSet sa_sample(const Qubo& qubo, const SamplerConfig& config,
                    std::optional<std::span<const Bit>> initial = {});

SampleSet tabu_sample(const Qubo& qubo, const SamplerConfig& config,
                      std::optional<std::span<const Bit>> initial = {});

// Uniform random assignments; the floor every other sampler must beat.
SampleSet random_sample(const Qubo& qubo, const SamplerConfig& config);

inline constexpr int kExactSolveMaxVars = 25;
inline constexpr int kBruteForceMaxCities = 11;

Sample exact_solve(const Qubo& qubo);

Tour brute_force_tsp(const Instance& instance);

}  // namespace qtsp
