#include "qtsp/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "qtsp/error.hpp"
#include "qtsp/rng.hpp"

namespace qtsp {

void HybridConfig::validate() const {
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (convergence_patience < 1)
    throw ConfigError("convergence_patience must be >= 1");
  if (subproblem_size && *subproblem_size < 1)
    throw ConfigError("subproblem_size must be >= 1");
  if (tour_blocks < 0) throw ConfigError("tour_blocks must be >= 0");
  if (tour_block_vars < 4 || tour_block_vars > kExactSolveMaxVars) {
    throw ConfigError(fmt::format("tour_block_vars must be in 4..{}", kExactSolveMaxVars));
  }
  tabu.validate();
  sa.validate();
  subproblem.validate();
}

int HybridConfig::subproblem_size_for(int num_vars) const {
  return std::min(subproblem_size.value_or(50), num_vars);
}

std::string_view to_string(Branch branch) {
  switch (branch) {
    case Branch::kTabu:
      return "tabu";
    case Branch::kSa:
      return "sa";
    case Branch::kSubproblem:
      return "subproblem";
    case Branch::kIncumbent:
      return "incumbent";
  }
  return "?";
}

namespace {

void check_state(int num_vars, std::span<const Bit> current) {
  if (static_cast<int>(current.size()) != num_vars) {
    throw StructuralError(fmt::format("state has {} bits, QUBO has {}",
                                      current.size(), num_vars));
  }
}

bool is_tour_encoding(const IndexScheme& scheme, std::span<const Bit> current) {
  const int side = scheme.side();
  std::vector<int> per_city(side, 0), per_position(side, 0);
  for (int v = 0; v < scheme.num_vars(); ++v) {
    if (!current[v]) continue;
    ++per_city[scheme.city_of(v) - 1];
    ++per_position[scheme.position_of(v) - 1];
  }
  for (int k = 0; k < side; ++k)
    if (per_city[k] != 1 || per_position[k] != 1) return false;
  return true;
}

}  // namespace

std::vector<int> select_subproblem(const Qubo& qubo, std::span<const Bit> current,
                                   int k) {
  check_state(qubo.num_vars(), current);
  return select_subproblem(CompiledQubo(qubo), current, k);
}

std::vector<int> select_subproblem(const CompiledQubo& cq,
                                   std::span<const Bit> current, int k) {
  const int n = cq.num_vars();
  check_state(n, current);
  std::vector<double> impact(n);
  for (int i = 0; i < n; ++i) impact[i] = std::abs(cq.flip_delta(current, i));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const int take = std::clamp(k, 0, n);
  std::partial_sort(order.begin(), order.begin() + take, order.end(),
                    [&](int a, int b) {
                      if (impact[a] != impact[b]) return impact[a] > impact[b];
                      return a < b;
                    });
  order.resize(take);
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<int> select_tour_block(const Qubo& qubo, std::span<const Bit> current,
                                   int max_vars, Rng& rng) {
  check_state(qubo.num_vars(), current);
  if (!qubo.scheme()) return {};
  return select_tour_block(CompiledQubo(qubo), *qubo.scheme(), current, max_vars, rng);
}

std::vector<int> select_tour_block(const CompiledQubo& cq, const IndexScheme& scheme,
                                   std::span<const Bit> current, int max_vars,
                                   Rng& rng) {
  check_state(cq.num_vars(), current);
  if (scheme.num_vars() != cq.num_vars() || !is_tour_encoding(scheme, current))
    return {};
  const int side = scheme.side();
  const int r = std::min(side, static_cast<int>(std::sqrt(std::max(max_vars, 1))));
  if (r < 2) return {};

  // city_at[p - 1] for positions 1..side.
  std::vector<City> city_at(side);
  for (int v = 0; v < cq.num_vars(); ++v)
    if (current[v]) city_at[scheme.position_of(v) - 1] = scheme.city_of(v);

  // Most negative flip delta first: removing that city saves the most.
  std::vector<double> delta(side);
  for (int p = 0; p < side; ++p)
    delta[p] = cq.flip_delta(current, scheme.index(city_at[p], p + 1));
  std::vector<int> rank(side);
  std::iota(rank.begin(), rank.end(), 0);
  std::stable_sort(rank.begin(), rank.end(),
                   [&](int a, int b) { return delta[a] < delta[b]; });
  const int anchor = rank[rng.below(std::max(1, side / 4))];

  std::vector<int> positions;
  if (rng.coin()) {
    const int first =
        std::clamp(anchor - static_cast<int>(rng.below(r)), 0, side - r);
    for (int p = first; p < first + r; ++p) positions.push_back(p);
  } else {
    std::vector<int> others;
    for (int p = 0; p < side; ++p)
      if (p != anchor) others.push_back(p);
    positions.push_back(anchor);
    for (int k = 0; k < r - 1; ++k) {
      const auto pick = k + rng.below(others.size() - k);
      std::swap(others[k], others[pick]);
      positions.push_back(others[k]);
    }
  }

  std::vector<int> block;
  for (int p : positions)
    for (int q : positions) block.push_back(scheme.index(city_at[p], q + 1));
  std::sort(block.begin(), block.end());
  return block;
}

ClampedSubproblem clamp_subproblem(const Qubo& qubo, std::span<const Bit> current,
                                   std::span<const int> subset) {
  check_state(qubo.num_vars(), current);
  return clamp_subproblem(CompiledQubo(qubo), current, subset);
}

ClampedSubproblem clamp_subproblem(const CompiledQubo& cq,
                                   std::span<const Bit> current,
                                   std::span<const int> subset) {
  const int n = cq.num_vars();
  check_state(n, current);
  if (subset.empty()) throw StructuralError("empty subproblem");
  std::vector<int> local(n, -1);
  for (size_t k = 0; k < subset.size(); ++k) {
    const int v = subset[k];
    if (v < 0 || v >= n || local[v] >= 0) {
      throw StructuralError(fmt::format("bad subproblem variable {}", v));
    }
    local[v] = static_cast<int>(k);
  }

  ClampedSubproblem out{Qubo(static_cast<int>(subset.size())),
                        std::vector<int>(subset.begin(), subset.end())};
  Qubo& sub = out.sub;
  Bits frozen(current.begin(), current.end());
  for (int v : subset) frozen[v] = 0;
  sub.add_offset(cq.energy(frozen));
  for (size_t a = 0; a < subset.size(); ++a) {
    const int i = subset[a];
    double linear = cq.linear(i);
    for (const auto& nb : cq.neighbors(i)) {
      if (local[nb.var] < 0) {
        if (current[nb.var]) linear += nb.weight;
      } else if (local[nb.var] > static_cast<int>(a)) {
        sub.add_quadratic(static_cast<int>(a), local[nb.var], nb.weight);
      }
    }
    sub.add_linear(static_cast<int>(a), linear);
  }
  return out;
}

Bits solve_subproblem(const Qubo& qubo, std::span<const Bit> current,
                      std::span<const int> subset,
                      const SamplerConfig& fallback) {
  check_state(qubo.num_vars(), current);
  return solve_subproblem(CompiledQubo(qubo), current, subset, fallback);
}

Bits solve_subproblem(const CompiledQubo& cq, std::span<const Bit> current,
                      std::span<const int> subset,
                      const SamplerConfig& fallback) {
  const ClampedSubproblem clamped = clamp_subproblem(cq, current, subset);
  const int k = clamped.sub.num_vars();

  Bits now(k);
  for (int a = 0; a < k; ++a) now[a] = current[clamped.vars[a]];

  Bits chosen;
  if (k <= kExactSolveMaxVars) {
    chosen = exact_solve(clamped.sub).bits;
  } else {
    const SampleSet set = sa_sample(clamped.sub, fallback, now);
    chosen = set.best().bits;
  }
  if (!(qubo_energy(clamped.sub, chosen) < qubo_energy(clamped.sub, now)))
    chosen = now;

  Bits out(current.begin(), current.end());
  for (int a = 0; a < k; ++a) out[clamped.vars[a]] = chosen[a];
  return out;
}

namespace {

struct BranchSeeds {
  std::uint64_t tabu, sa, subproblem;
};

BranchSeeds seeds_for(std::uint64_t seed, int iteration) {
  const auto base = static_cast<std::uint64_t>(iteration) * 4;
  return {derive_seed(seed, base + 1), derive_seed(seed, base + 2),
          derive_seed(seed, base + 3)};
}

// Strictly lower energy wins; equal energies fall back to lexicographic bits.
bool better(const Sample& a, const Sample& b, double eps) {
  if (a.energy < b.energy - eps) return true;
  if (a.energy > b.energy + eps) return false;
  return a.bits < b.bits;
}

}  // namespace

HybridResult run_hybrid(const Qubo& qubo, const HybridConfig& config) {
  config.validate();
  const int n = qubo.num_vars();
  const double eps = 1e-9 * std::max(1.0, qubo.max_abs_coefficient());
  const int k = config.subproblem_size_for(n);
  const CompiledQubo cq(qubo);

  HybridState state;
  {
    Rng rng(derive_seed(config.seed, 0));
    state.incumbent.bits.resize(n);
    for (auto& b : state.incumbent.bits) b = rng.coin() ? 1 : 0;
    state.incumbent.energy = qubo_energy(qubo, state.incumbent.bits);
  }

  bool converged = false;
  while (state.iteration < config.max_iterations) {
    ++state.iteration;
    const BranchSeeds seeds = seeds_for(config.seed, state.iteration);
    const Bits& from = state.incumbent.bits;

    auto run_tabu = [&] {
      SamplerConfig c = config.tabu;
      c.seed = seeds.tabu;
      return tabu_sample(qubo, c, from).best();
    };
    auto run_sa = [&] {
      SamplerConfig c = config.sa;
      c.seed = seeds.sa;
      return sa_sample(qubo, c, from).best();
    };
    auto run_sub = [&] {
      SamplerConfig c = config.subproblem;
      c.seed = seeds.subproblem;
      const std::vector<int> subset = select_subproblem(cq, from, k);
      Sample s;
      s.bits = solve_subproblem(cq, from, subset, c);
      if (qubo.scheme()) {
        Rng rng(derive_seed(seeds.subproblem, 1));
        for (int b = 0; b < config.tour_blocks; ++b) {
          const std::vector<int> block =
              select_tour_block(cq, *qubo.scheme(), s.bits, config.tour_block_vars, rng);
          if (block.empty()) break;
          s.bits = solve_subproblem(cq, s.bits, block, c);
        }
      }
      s.energy = qubo_energy(qubo, s.bits);
      return s;
    };

    Sample results[3];
    if (config.concurrent_branches) {
      auto f_tabu = std::async(std::launch::async, run_tabu);
      auto f_sa = std::async(std::launch::async, run_sa);
      results[2] = run_sub();
      results[0] = f_tabu.get();
      results[1] = f_sa.get();
    } else {
      results[0] = run_tabu();
      results[1] = run_sa();
      results[2] = run_sub();
    }

    static constexpr Branch kBranches[] = {Branch::kTabu, Branch::kSa,
                                           Branch::kSubproblem};
    Sample next = state.incumbent;
    for (int b = 0; b < 3; ++b) {
      state.trace.push_back({state.iteration, kBranches[b], results[b].energy,
                             is_feasible(qubo, results[b].bits)});
      if (better(results[b], next, eps)) next = results[b];
    }

    if (next.energy < state.incumbent.energy - eps) {
      state.no_improve_count = 0;
    } else {
      ++state.no_improve_count;
    }
    state.incumbent = std::move(next);
    state.trace.push_back({state.iteration, Branch::kIncumbent,
                           state.incumbent.energy,
                           is_feasible(qubo, state.incumbent.bits)});

    if (state.no_improve_count >= config.convergence_patience) {
      converged = true;
      break;
    }
  }

  return {std::move(state.incumbent), std::move(state.trace), state.iteration,
          converged};
}

void write_trace(std::span<const TraceRecord> trace, std::ostream& out) {
  for (const auto& r : trace) {
    out << fmt::format("{},{},{},{}\n", r.iteration, to_string(r.branch),
                       r.energy, r.feasible ? 1 : 0);
  }
}

}  // namespace qtsp
