#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qtsp/tsplib.hpp"

namespace qtsp {

using Bit = std::uint8_t;
using Bits = std::vector<Bit>;

// Maps (city, position) with both in 1..N-1 (0-based; city 0 is pinned to
// position 0) onto a variable index in 0..(N-1)^2-1, city-major.
class IndexScheme {
 public:
  explicit IndexScheme(int num_cities) : num_cities_(num_cities) {}

  int num_cities() const { return num_cities_; }
  int side() const { return num_cities_ - 1; }
  int num_vars() const { return side() * side(); }

  int index(City city, int position) const {
    return (city - 1) * side() + (position - 1);
  }
  City city_of(int var) const { return var / side() + 1; }
  int position_of(int var) const { return var % side() + 1; }

  bool operator==(const IndexScheme&) const = default;

 private:
  int num_cities_;
};

// Upper-triangular QUBO: E(x) = offset + sum_i a_i x_i + sum_{i<j} q_ij x_i x_j.
// Zero coefficients are never stored.
class Qubo {
 public:
  using Pair = std::pair<int, int>;

  explicit Qubo(int num_vars, std::optional<IndexScheme> scheme = {});

  int num_vars() const { return num_vars_; }
  const std::optional<IndexScheme>& scheme() const { return scheme_; }

  void add_offset(double c) { offset_ += c; }
  void add_linear(int i, double c);
  // Accepts either order of (i, j); i == j folds into the linear term.
  void add_quadratic(int i, int j, double c);

  double offset() const { return offset_; }
  double linear(int i) const;
  double quadratic(int i, int j) const;
  const std::map<int, double>& linear_terms() const { return linear_; }
  const std::map<Pair, double>& quadratic_terms() const { return quadratic_; }

  double max_abs_coefficient() const;
  double min_abs_coefficient() const;

  bool operator==(const Qubo&) const = default;

 private:
  void check_index(int i) const;

  int num_vars_;
  std::optional<IndexScheme> scheme_;
  double offset_ = 0;
  std::map<int, double> linear_;
  std::map<Pair, double> quadratic_;
};

// Dense linear terms plus a symmetric adjacency list, for samplers that need
// O(degree) flip updates.
class CompiledQubo {
 public:
  struct Neighbor {
    int var;
    double weight;
  };

  explicit CompiledQubo(const Qubo& qubo);

  int num_vars() const { return static_cast<int>(linear_.size()); }
  double offset() const { return offset_; }
  double linear(int i) const { return linear_[i]; }
  std::span<const Neighbor> neighbors(int i) const {
    return {neighbors_.data() + starts_[i], neighbors_.data() + starts_[i + 1]};
  }

  double energy(std::span<const Bit> bits) const;
  // field_i = a_i + sum_j q_ij x_j, so flipping i changes E by
  // (1 - 2 x_i) * field_i.
  std::vector<double> local_fields(std::span<const Bit> bits) const;
  double flip_delta(std::span<const Bit> bits, int i) const;

 private:
  double offset_;
  std::vector<double> linear_;
  std::vector<size_t> starts_;
  std::vector<Neighbor> neighbors_;
};

struct TuningParams {
  double gamma = 1.0;
  // Recorded for parity with hardware workflows; has no effect here.
  double chain_strength = 0.0;
  int num_runs = 100;
  double anneal_time = 1000.0;

  void validate() const;
};

struct Sample {
  Bits bits;
  double energy = 0;
  int occurrences = 1;

  bool operator==(const Sample&) const = default;
};

struct OneHotViolation {
  enum class Group { kPosition, kCity };
  Group group;
  int label;  // 1-based city or position
  int count;  // number of ones in the group

  bool operator==(const OneHotViolation&) const = default;
};

struct ConstraintReport {
  std::vector<OneHotViolation> violations;

  std::string describe() const;
};

using Decoded = std::variant<Tour, ConstraintReport>;

double default_gamma(const Instance& instance);

Qubo build_qubo(const Instance& instance, const TuningParams& params);

double qubo_energy(const Qubo& qubo, std::span<const Bit> bits);

Sample encode_tour(const Qubo& qubo, const Tour& tour);

// No repair: anything that is not an exact permutation encoding comes back
// as a ConstraintReport.
Decoded decode_sample(const Qubo& qubo, const Sample& sample,
                      const Instance& instance);

bool is_feasible(const Qubo& qubo, std::span<const Bit> bits);

// "offset <c> num_vars <n>" header, then one "i j coeff" line per term,
// linear terms written as "i i coeff".
void write_qubo_text(const Qubo& qubo, std::ostream& out);
Qubo read_qubo_text(std::istream& in);

}  // namespace qtsp
