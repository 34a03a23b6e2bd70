#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qtsp/qubo.hpp"

namespace qtsp {

inline constexpr int kMaxSpins = 10;

// Spin convention, fixed everywhere: x = (1 - s) / 2. Basis state index bit
// i holds x_i, so x_i = 1 is spin s_i = -1.
struct IsingModel {
  int num_spins = 0;
  std::vector<double> h;
  std::map<std::pair<int, int>, double> J;
  double offset = 0;

  // Energy without the offset, for the computational basis state `state`.
  double basis_energy(std::uint32_t state) const;
  // Offset included; equals the QUBO energy of the same assignment.
  double energy(std::span<const Bit> bits) const;
};

IsingModel qubo_to_ising(const Qubo& qubo);

struct AnnealSchedule {
  double total_time = 1.0;
  // s(u) on [0, 1], non-decreasing, s(0) = 0 and s(1) = 1.
  std::function<double(double)> s_of_u = [](double u) { return u; };
  // Lower bound; evolve() adds steps until |H| dt <= 0.1.
  int num_steps = 1;

  void validate() const;
};

struct AnnealResult {
  std::vector<std::complex<double>> final_state;
  double success_probability = 0;
  double norm_error = 0;
  int steps = 0;
};

// Schrodinger evolution under H(u) = (1 - s(u)) H_o + s(u) H_p with
// H_o = -sum_i sigma_x^(i), starting from its ground state (the uniform
// superposition). Each step holds H at its midpoint value and applies the
// symmetric split H_p/2, H_o, H_p/2, which is exactly unitary.
AnnealResult evolve(const IsingModel& model, const AnnealSchedule& schedule);

// Basis states attaining the minimum classical energy.
std::vector<std::uint32_t> ground_states(const IsingModel& model);

double success_probability(std::span<const std::complex<double>> state,
                           const IsingModel& model);
double success_probability(const AnnealResult& result, const IsingModel& model);

// Upper bound on the operator norm of H(u) for any u.
double hamiltonian_norm_bound(const IsingModel& model);

// Dense H at schedule value s (offset excluded: it is a global phase).
Eigen::MatrixXcd hamiltonian_matrix(const IsingModel& model, double s);

}  // namespace qtsp
