#include "qtsp/annealsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "qtsp/error.hpp"

namespace qtsp {

namespace {

// Largest |H| dt allowed per step.
constexpr double kMaxPhasePerStep = 0.1;

int spin(std::uint32_t state, int i) { return (state >> i) & 1u ? -1 : 1; }

}  // namespace

double IsingModel::basis_energy(std::uint32_t state) const {
  double e = 0;
  for (int i = 0; i < num_spins; ++i) e += h[i] * spin(state, i);
  for (const auto& [ij, c] : J) e += c * spin(state, ij.first) * spin(state, ij.second);
  return e;
}

double IsingModel::energy(std::span<const Bit> bits) const {
  std::uint32_t state = 0;
  for (int i = 0; i < num_spins; ++i)
    if (bits[i]) state |= 1u << i;
  return basis_energy(state) + offset;
}

IsingModel qubo_to_ising(const Qubo& qubo) {
  const int n = qubo.num_vars();
  if (n > kMaxSpins) {
    throw SizeError(fmt::format("anneal simulation is limited to {} spins, QUBO has {}",
                                kMaxSpins, n));
  }
  IsingModel m;
  m.num_spins = n;
  m.h.assign(n, 0.0);
  m.offset = qubo.offset();
  // c x = c/2 - (c/2) s
  for (const auto& [i, c] : qubo.linear_terms()) {
    m.h[i] -= c / 2;
    m.offset += c / 2;
  }
  // q x_i x_j = q/4 (1 - s_i - s_j + s_i s_j)
  for (const auto& [ij, q] : qubo.quadratic_terms()) {
    m.J[ij] += q / 4;
    m.h[ij.first] -= q / 4;
    m.h[ij.second] -= q / 4;
    m.offset += q / 4;
  }
  return m;
}

void AnnealSchedule::validate() const {
  if (!(total_time > 0)) throw ConfigError("total anneal time must be positive");
  if (num_steps < 1) throw ConfigError("num_steps must be positive");
  if (!s_of_u) throw ConfigError("schedule function is missing");
  if (s_of_u(0.0) != 0.0 || s_of_u(1.0) != 1.0)
    throw ConfigError("schedule must satisfy s(0) = 0 and s(1) = 1");
}

double hamiltonian_norm_bound(const IsingModel& model) {
  double problem = 0;
  for (double v : model.h) problem += std::abs(v);
  for (const auto& [ij, c] : model.J) problem += std::abs(c);
  return std::max(static_cast<double>(model.num_spins), problem);
}

std::vector<std::uint32_t> ground_states(const IsingModel& model) {
  const std::uint32_t dim = 1u << model.num_spins;
  std::vector<double> e(dim);
  double lo = std::numeric_limits<double>::infinity();
  double scale = 1.0;
  for (std::uint32_t z = 0; z < dim; ++z) {
    e[z] = model.basis_energy(z);
    lo = std::min(lo, e[z]);
    scale = std::max(scale, std::abs(e[z]));
  }
  std::vector<std::uint32_t> out;
  for (std::uint32_t z = 0; z < dim; ++z)
    if (e[z] <= lo + 1e-9 * scale) out.push_back(z);
  return out;
}

double success_probability(std::span<const std::complex<double>> state,
                           const IsingModel& model) {
  double p = 0;
  for (std::uint32_t z : ground_states(model)) p += std::norm(state[z]);
  return std::clamp(p, 0.0, 1.0);
}

double success_probability(const AnnealResult& result, const IsingModel& model) {
  return success_probability(result.final_state, model);
}

AnnealResult evolve(const IsingModel& model, const AnnealSchedule& schedule) {
  const int n = model.num_spins;
  if (n < 1 || n > kMaxSpins) {
    throw SizeError(fmt::format("anneal simulation needs 1..{} spins, got {}",
                                kMaxSpins, n));
  }
  schedule.validate();

  const double T = schedule.total_time;
  const double required =
      std::ceil(T * hamiltonian_norm_bound(model) / kMaxPhasePerStep);
  const int steps = std::max(
      schedule.num_steps,
      static_cast<int>(std::min(required, double{std::numeric_limits<int>::max()})));
  const double dt = T / steps;

  std::vector<double> s_values(steps);
  double prev = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double s = schedule.s_of_u((k + 0.5) / steps);
    if (!(s >= prev) || s > 1.0)
      throw ConfigError("schedule s(u) must be non-decreasing within [0, 1]");
    s_values[k] = prev = s;
  }

  const std::uint32_t dim = 1u << n;
  std::vector<double> diag(dim);
  for (std::uint32_t z = 0; z < dim; ++z) diag[z] = model.basis_energy(z);

  using C = std::complex<double>;
  std::vector<C> psi(dim, C(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));

  auto apply_problem = [&](double s, double tau) {
    for (std::uint32_t z = 0; z < dim; ++z)
      psi[z] *= std::polar(1.0, -s * diag[z] * tau);
  };
  for (int k = 0; k < steps; ++k) {
    const double s = s_values[k];
    apply_problem(s, dt / 2);
    // exp(-i (1 - s) dt (-sigma_x)) = cos(theta) + i sin(theta) sigma_x
    const double theta = (1.0 - s) * dt;
    const C c(std::cos(theta), 0.0), is(0.0, std::sin(theta));
    for (int q = 0; q < n; ++q) {
      const std::uint32_t bit = 1u << q;
      for (std::uint32_t z = 0; z < dim; ++z) {
        if (z & bit) continue;
        const C a = psi[z], b = psi[z | bit];
        psi[z] = c * a + is * b;
        psi[z | bit] = is * a + c * b;
      }
    }
    apply_problem(s, dt / 2);
  }

  AnnealResult result;
  double norm = 0;
  for (const C& a : psi) norm += std::norm(a);
  result.norm_error = std::abs(norm - 1.0);
  result.final_state = std::move(psi);
  result.success_probability = success_probability(result.final_state, model);
  result.steps = steps;
  return result;
}

Eigen::MatrixXcd hamiltonian_matrix(const IsingModel& model, double s) {
  const int n = model.num_spins;
  if (n < 1 || n > kMaxSpins) {
    throw SizeError(fmt::format("dense Hamiltonian needs 1..{} spins, got {}",
                                kMaxSpins, n));
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index z = 0; z < dim; ++z) {
    H(z, z) += s * model.basis_energy(static_cast<std::uint32_t>(z));
    for (int q = 0; q < n; ++q) H(z, z ^ (Eigen::Index{1} << q)) += -(1.0 - s);
  }
  return H;
}

}  // namespace qtsp
