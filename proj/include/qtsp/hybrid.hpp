#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qtsp/qubo.hpp"
#include "qtsp/rng.hpp"
#include "qtsp/samplers.hpp"

namespace qtsp {

// Kerberos-style racing workflow. Every iteration runs three branches from
// the current incumbent (tabu, simulated annealing, and an energy-impact
// subproblem solved with the rest of the variables clamped), then keeps the
// lowest-energy state among the branches and the incumbent itself. On TSP
// QUBOs the subproblem branch follows up with an exact tour-block solve.
struct HybridConfig {
  int max_iterations = 100;
  int convergence_patience = 10;
  // Unset: min(50, num_vars).
  std::optional<int> subproblem_size;
  SamplerConfig tabu;
  SamplerConfig sa;
  // Used for subproblems too large for exact enumeration.
  SamplerConfig subproblem;
  // Exact tour-block solves per subproblem branch (TSP QUBOs only) and the
  // variable budget of each block. 0 blocks disables the follow-up.
  int tour_blocks = 32;
  int tour_block_vars = 16;
  std::uint64_t seed = 0;
  // Run the three branches on separate threads. The result is identical
  // either way.
  bool concurrent_branches = false;

  void validate() const;
  int subproblem_size_for(int num_vars) const;
};

enum class Branch { kTabu, kSa, kSubproblem, kIncumbent };

std::string_view to_string(Branch branch);

struct TraceRecord {
  int iteration = 0;
  Branch branch = Branch::kIncumbent;
  double energy = 0;
  bool feasible = false;

  bool operator==(const TraceRecord&) const = default;
};

struct HybridState {
  Sample incumbent;
  int iteration = 0;
  int no_improve_count = 0;
  std::vector<TraceRecord> trace;
};

struct HybridResult {
  Sample best;
  std::vector<TraceRecord> trace;
  int iterations = 0;
  bool converged = false;
};

HybridResult run_hybrid(const Qubo& qubo, const HybridConfig& config);

// The k variables whose single flip changes the energy most, ties to the
// lower index. Returned in ascending index order.
std::vector<int> select_subproblem(const Qubo& qubo, std::span<const Bit> current,
                                   int k);
std::vector<int> select_subproblem(const CompiledQubo& qubo,
                                   std::span<const Bit> current, int k);

// Tour block for TSP QUBOs: r = floor(sqrt(max_vars)) cities together with
// the positions they currently occupy, r * r variables in ascending order.
// The anchor city is drawn from the worst-placed quarter (ranked by the flip
// delta of its occupied variable); the other r - 1 cities are either the
// anchor's position window or uniform picks. Empty when the QUBO has no
// index scheme or `current` is not a feasible tour encoding.
std::vector<int> select_tour_block(const Qubo& qubo, std::span<const Bit> current,
                                   int max_vars, Rng& rng);
std::vector<int> select_tour_block(const CompiledQubo& qubo, const IndexScheme& scheme,
                                   std::span<const Bit> current, int max_vars, Rng& rng);

// Sub-QUBO over `subset` with every other variable frozen at `current`.
// Frozen interactions fold into linear terms and the offset, so
// sub.energy(y) == qubo_energy(full state with subset := y).
struct ClampedSubproblem {
  Qubo sub;
  std::vector<int> vars;
};

ClampedSubproblem clamp_subproblem(const Qubo& qubo, std::span<const Bit> current,
                                   std::span<const int> subset);
ClampedSubproblem clamp_subproblem(const CompiledQubo& qubo,
                                   std::span<const Bit> current,
                                   std::span<const int> subset);

// Exact for |subset| <= kExactSolveMaxVars, simulated annealing otherwise.
// Never returns a state worse than `current`.
Bits solve_subproblem(const Qubo& qubo, std::span<const Bit> current,
                      std::span<const int> subset,
                      const SamplerConfig& fallback = {});
Bits solve_subproblem(const CompiledQubo& qubo, std::span<const Bit> current,
                      std::span<const int> subset,
                      const SamplerConfig& fallback = {});

// One "iteration,branch,energy,feasible" line per record.
void write_trace(std::span<const TraceRecord> trace, std::ostream& out);

}  // namespace qtsp
