#include "qtsp/samplers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "parallel.hpp"
#include "qtsp/error.hpp"
#include "qtsp/rng.hpp"

namespace qtsp {

void SamplerConfig::validate() const {
  if (num_reads < 10 || num_reads > 1000) {
    throw ConfigError(
        fmt::format("num_reads {} outside the range 10..1000", num_reads));
  }
  if (sweeps < 1) throw ConfigError("sweeps must be positive");
  if (beta_range) {
    if (!(beta_range->initial > 0) || !(beta_range->final > 0) ||
        !(beta_range->initial < beta_range->final)) {
      throw ConfigError("beta range must satisfy 0 < initial < final");
    }
  }
  if (tabu_tenure && *tabu_tenure < 1)
    throw ConfigError("tabu tenure must be positive");
  if (tabu_steps < 1) throw ConfigError("tabu step budget must be positive");
  if (tabu_timeout.count() <= 0)
    throw ConfigError("tabu timeout must be positive");
  if (tabu_restart_stall < 0)
    throw ConfigError("tabu restart stall must be non-negative");
  if (threads < 1) throw ConfigError("threads must be positive");
}

const Sample& SampleSet::best() const {
  if (samples.empty()) throw StructuralError("empty sample set");
  return samples.front();
}

int SampleSet::total_reads() const {
  int total = 0;
  for (const auto& s : samples) total += s.occurrences;
  return total;
}

SampleSet make_sample_set(const Qubo& qubo, std::vector<Bits> states,
                          std::string sampler, std::uint64_t seed) {
  std::map<Bits, int> counts;
  for (auto& s : states) ++counts[std::move(s)];
  SampleSet set;
  set.sampler = std::move(sampler);
  set.seed = seed;
  set.samples.reserve(counts.size());
  for (auto& [bits, count] : counts) {
    const double e = qubo_energy(qubo, bits);
    set.samples.push_back({bits, e, count});
  }
  // counts is already in lexicographic order; a stable sort keeps it for ties.
  std::stable_sort(set.samples.begin(), set.samples.end(),
                   [](const Sample& a, const Sample& b) {
                     return a.energy < b.energy;
                   });
  return set;
}

int sweeps_for_anneal_time(double anneal_time) {
  if (!(anneal_time > 0)) throw ConfigError("anneal_time must be positive");
  return std::max(1, static_cast<int>(std::lround(anneal_time)));
}

BetaRange default_beta_range(const Qubo& qubo) {
  const double hi = qubo.max_abs_coefficient();
  const double lo = qubo.min_abs_coefficient();
  if (hi == 0) return {0.1, 10.0};
  return {0.1 / hi, 10.0 / lo};
}

namespace {

Bits random_bits(int n, Rng& rng) {
  Bits bits(n);
  for (auto& b : bits) b = rng.coin() ? 1 : 0;
  return bits;
}

Bits initial_or_random(const Qubo& qubo, std::optional<std::span<const Bit>> initial,
                       Rng& rng) {
  if (!initial) return random_bits(qubo.num_vars(), rng);
  if (static_cast<int>(initial->size()) != qubo.num_vars()) {
    throw StructuralError(fmt::format("initial state has {} bits, QUBO has {}",
                                      initial->size(), qubo.num_vars()));
  }
  return Bits(initial->begin(), initial->end());
}

void apply_flip(const CompiledQubo& cq, Bits& x, std::vector<double>& field,
                int i) {
  x[i] ^= 1;
  const double sign = x[i] ? 1.0 : -1.0;
  for (const auto& nb : cq.neighbors(i)) field[nb.var] += sign * nb.weight;
}

// Improvement threshold; the paper instances are integral so any real
// improvement is at least 1.
double tolerance(const Qubo& qubo) {
  return 1e-9 * std::max(1.0, qubo.max_abs_coefficient());
}

}  // namespace

SampleSet sa_sample(const Qubo& qubo, const SamplerConfig& config,
                    std::optional<std::span<const Bit>> initial) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const CompiledQubo cq(qubo);
  const int n = cq.num_vars();
  const BetaRange range = config.beta_range.value_or(default_beta_range(qubo));

  std::vector<double> betas(config.sweeps);
  for (int s = 0; s < config.sweeps; ++s) {
    const double frac =
        config.sweeps == 1 ? 1.0 : static_cast<double>(s) / (config.sweeps - 1);
    betas[s] = range.initial * std::pow(range.final / range.initial, frac);
  }

  std::vector<Bits> finals(config.num_reads);
  detail::parallel_for(config.num_reads, config.threads, [&](int read) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(read)));
    Bits x = initial_or_random(qubo, initial, rng);
    std::vector<double> field = cq.local_fields(x);
    for (const double beta : betas) {
      for (int i = 0; i < n; ++i) {
        const double delta = x[i] ? -field[i] : field[i];
        if (delta <= 0 || rng.uniform() < std::exp(-beta * delta)) {
          apply_flip(cq, x, field, i);
        }
      }
    }
    finals[read] = std::move(x);
  });

  SampleSet set = make_sample_set(qubo, std::move(finals), "sa", config.seed);
  set.wall_time = std::chrono::steady_clock::now() - start;
  return set;
}

SampleSet tabu_sample(const Qubo& qubo, const SamplerConfig& config,
                      std::optional<std::span<const Bit>> initial) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto deadline = start + config.tabu_timeout;
  const CompiledQubo cq(qubo);
  const int n = cq.num_vars();
  const double eps = tolerance(qubo);

  Rng rng(derive_seed(config.seed, 0x7ab0ULL));
  Bits x = initial_or_random(qubo, initial, rng);
  std::vector<double> field = cq.local_fields(x);
  double energy = cq.energy(x);
  Bits best = x;
  double best_energy = energy;

  // A tenure of n or more would leave no admissible move.
  const int tenure = std::min(
      config.tabu_tenure.value_or(std::clamp(n / 4, 1, 20)), n - 1);
  std::vector<long> tabu_until(n, 0);
  long stall = 0;

  for (long step = 0; step < config.tabu_steps; ++step) {
    if ((step & 1023) == 0 && std::chrono::steady_clock::now() > deadline) break;

    int chosen = -1;
    double chosen_delta = std::numeric_limits<double>::infinity();
    std::uint64_t ties = 0;
    for (int i = 0; i < n; ++i) {
      const double delta = x[i] ? -field[i] : field[i];
      const bool admissible =
          tabu_until[i] <= step || energy + delta < best_energy - eps;
      if (!admissible) continue;
      if (delta < chosen_delta - eps) {
        chosen = i;
        chosen_delta = delta;
        ties = 1;
      } else if (delta <= chosen_delta + eps && rng.below(++ties) == 0) {
        chosen = i;
      }
    }
    if (chosen < 0) break;

    apply_flip(cq, x, field, chosen);
    energy += chosen_delta;
    tabu_until[chosen] = step + 1 + tenure;

    if (energy < best_energy - eps) {
      best_energy = energy;
      best = x;
      stall = 0;
    } else if (config.tabu_restart_stall > 0 &&
               ++stall >= config.tabu_restart_stall) {
      x = best;
      const int kicks = std::max(2, n / 10);
      for (int k = 0; k < kicks; ++k) x[rng.below(n)] ^= 1;
      field = cq.local_fields(x);
      energy = cq.energy(x);
      std::fill(tabu_until.begin(), tabu_until.end(), 0);
      stall = 0;
    }
  }

  std::vector<Bits> states;
  states.push_back(std::move(best));
  SampleSet set = make_sample_set(qubo, std::move(states), "tabu", config.seed);
  set.wall_time = std::chrono::steady_clock::now() - start;
  return set;
}

SampleSet random_sample(const Qubo& qubo, const SamplerConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<Bits> states(config.num_reads);
  for (int r = 0; r < config.num_reads; ++r) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(r)));
    states[r] = random_bits(qubo.num_vars(), rng);
  }
  SampleSet set = make_sample_set(qubo, std::move(states), "random", config.seed);
  set.wall_time = std::chrono::steady_clock::now() - start;
  return set;
}

Sample exact_solve(const Qubo& qubo) {
  const int n = qubo.num_vars();
  if (n > kExactSolveMaxVars) {
    throw SizeError(fmt::format(
        "exact solve is limited to {} variables, QUBO has {}",
        kExactSolveMaxVars, n));
  }
  const CompiledQubo cq(qubo);
  double scale = std::abs(qubo.offset());
  for (const auto& [i, c] : qubo.linear_terms()) scale += std::abs(c);
  for (const auto& [ij, c] : qubo.quadratic_terms()) scale += std::abs(c);
  const double tie = 1e-9 * std::max(1.0, scale);

  // Gray-code walk: one flip per step.
  Bits x(n, 0);
  std::vector<double> field = cq.local_fields(x);
  double energy = cq.offset();
  Bits best = x;
  double best_energy = energy;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const int i = std::countr_zero(k);
    energy += x[i] ? -field[i] : field[i];
    apply_flip(cq, x, field, i);
    if (energy < best_energy - tie) {
      best_energy = energy;
      best = x;
    } else if (energy <= best_energy + tie && x < best) {
      best = x;
    }
  }
  Sample sample;
  sample.energy = qubo_energy(qubo, best);
  sample.bits = std::move(best);
  return sample;
}

Tour brute_force_tsp(const Instance& instance) {
  const int n = instance.dimension();
  if (n > kBruteForceMaxCities) {
    throw SizeError(fmt::format(
        "brute force is limited to {} cities, instance {} has {}",
        kBruteForceMaxCities, instance.name, n));
  }
  const DistanceMatrix& d = instance.distances;
  std::vector<City> order(n);
  std::iota(order.begin(), order.end(), 0);
  Tour best{order, std::numeric_limits<Distance>::max()};
  do {
    Distance length = d(order[n - 1], order[0]);
    for (int k = 0; k + 1 < n; ++k) length += d(order[k], order[k + 1]);
    if (length < best.length) best = {order, length};
  } while (std::next_permutation(order.begin() + 1, order.end()));
  return best;
}

}  // namespace qtsp
