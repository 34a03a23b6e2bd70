#include "qtsp/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "qtsp/error.hpp"

namespace qtsp {

Qubo::Qubo(int num_vars, std::optional<IndexScheme> scheme)
    : num_vars_(num_vars), scheme_(scheme) {
  if (num_vars < 1) throw StructuralError("QUBO needs at least one variable");
  if (scheme_ && scheme_->num_vars() != num_vars) {
    throw StructuralError("index scheme does not cover the variables");
  }
}

void Qubo::check_index(int i) const {
  if (i < 0 || i >= num_vars_) {
    throw StructuralError(
        fmt::format("variable {} out of range 0..{}", i, num_vars_ - 1));
  }
}

void Qubo::add_linear(int i, double c) {
  check_index(i);
  if (c == 0) return;
  const double v = (linear_[i] += c);
  if (v == 0) linear_.erase(i);
}

void Qubo::add_quadratic(int i, int j, double c) {
  check_index(i);
  check_index(j);
  if (i == j) {
    add_linear(i, c);
    return;
  }
  if (c == 0) return;
  const Pair key = std::minmax(i, j);
  const double v = (quadratic_[key] += c);
  if (v == 0) quadratic_.erase(key);
}

double Qubo::linear(int i) const {
  const auto it = linear_.find(i);
  return it == linear_.end() ? 0.0 : it->second;
}

double Qubo::quadratic(int i, int j) const {
  const auto it = quadratic_.find(std::minmax(i, j));
  return it == quadratic_.end() ? 0.0 : it->second;
}

double Qubo::max_abs_coefficient() const {
  double m = 0;
  for (const auto& [i, c] : linear_) m = std::max(m, std::abs(c));
  for (const auto& [ij, c] : quadratic_) m = std::max(m, std::abs(c));
  return m;
}

double Qubo::min_abs_coefficient() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& [i, c] : linear_) m = std::min(m, std::abs(c));
  for (const auto& [ij, c] : quadratic_) m = std::min(m, std::abs(c));
  return std::isinf(m) ? 0.0 : m;
}

CompiledQubo::CompiledQubo(const Qubo& qubo)
    : offset_(qubo.offset()), linear_(qubo.num_vars(), 0.0) {
  const int n = qubo.num_vars();
  for (const auto& [i, c] : qubo.linear_terms()) linear_[i] = c;
  std::vector<size_t> degree(n, 0);
  for (const auto& [ij, c] : qubo.quadratic_terms()) {
    ++degree[ij.first];
    ++degree[ij.second];
  }
  starts_.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) starts_[i + 1] = starts_[i] + degree[i];
  neighbors_.resize(starts_[n]);
  std::vector<size_t> fill(starts_.begin(), starts_.end() - 1);
  for (const auto& [ij, c] : qubo.quadratic_terms()) {
    neighbors_[fill[ij.first]++] = {ij.second, c};
    neighbors_[fill[ij.second]++] = {ij.first, c};
  }
}

double CompiledQubo::energy(std::span<const Bit> bits) const {
  double e = offset_;
  for (int i = 0; i < num_vars(); ++i) {
    if (!bits[i]) continue;
    e += linear_[i];
    for (const Neighbor& nb : neighbors(i))
      if (nb.var > i && bits[nb.var]) e += nb.weight;
  }
  return e;
}

std::vector<double> CompiledQubo::local_fields(std::span<const Bit> bits) const {
  std::vector<double> field(linear_);
  for (int i = 0; i < num_vars(); ++i) {
    if (!bits[i]) continue;
    for (const Neighbor& nb : neighbors(i)) field[nb.var] += nb.weight;
  }
  return field;
}

double CompiledQubo::flip_delta(std::span<const Bit> bits, int i) const {
  double field = linear_[i];
  for (const Neighbor& nb : neighbors(i))
    if (bits[nb.var]) field += nb.weight;
  return bits[i] ? -field : field;
}

void TuningParams::validate() const {
  if (!(gamma > 0)) throw ConfigError("gamma must be positive");
  if (!(chain_strength >= 0))
    throw ConfigError("chain_strength must be non-negative");
  if (num_runs < 10 || num_runs > 1000)
    throw ConfigError(
        fmt::format("num_runs {} outside the range 10..1000", num_runs));
  if (!(anneal_time > 0)) throw ConfigError("anneal_time must be positive");
}

double default_gamma(const Instance& instance) {
  return static_cast<double>(instance.dimension()) *
         static_cast<double>(instance.distances.max_off_diagonal()) / 2.0;
}

Qubo build_qubo(const Instance& instance, const TuningParams& params) {
  params.validate();
  const int n = instance.dimension();
  if (n < 3) {
    throw SizeError(fmt::format("TSP QUBO needs at least 3 cities, got {}", n));
  }
  const IndexScheme scheme(n);
  const int side = scheme.side();
  const double gamma = params.gamma;
  const DistanceMatrix& d = instance.distances;
  Qubo qubo(scheme.num_vars(), scheme);

  // Each of the 2(N-1) one-hot groups contributes
  // gamma * (1 - sum x)^2 = gamma * (1 - sum x + 2 sum_{i<j} x_i x_j).
  qubo.add_offset(gamma * 2.0 * side);
  for (int v = 0; v < scheme.num_vars(); ++v) qubo.add_linear(v, -2.0 * gamma);
  for (int a = 1; a <= side; ++a) {
    for (int b = 1; b <= side; ++b) {
      for (int c = b + 1; c <= side; ++c) {
        qubo.add_quadratic(scheme.index(a, b), scheme.index(a, c), 2.0 * gamma);
        qubo.add_quadratic(scheme.index(b, a), scheme.index(c, a), 2.0 * gamma);
      }
    }
  }

  // Legs touching the pinned city 0 at position 0 are linear.
  for (City c = 1; c < n; ++c) {
    qubo.add_linear(scheme.index(c, 1), static_cast<double>(d(0, c)));
    qubo.add_linear(scheme.index(c, side), static_cast<double>(d(c, 0)));
  }
  for (int p = 1; p < side; ++p) {
    for (City u = 1; u < n; ++u) {
      for (City v = 1; v < n; ++v) {
        if (u == v) continue;
        qubo.add_quadratic(scheme.index(u, p), scheme.index(v, p + 1),
                           static_cast<double>(d(u, v)));
      }
    }
  }
  return qubo;
}

double qubo_energy(const Qubo& qubo, std::span<const Bit> bits) {
  if (static_cast<int>(bits.size()) != qubo.num_vars()) {
    throw StructuralError(fmt::format("sample has {} bits, QUBO has {}",
                                      bits.size(), qubo.num_vars()));
  }
  double e = qubo.offset();
  for (const auto& [i, c] : qubo.linear_terms())
    if (bits[i]) e += c;
  for (const auto& [ij, c] : qubo.quadratic_terms())
    if (bits[ij.first] && bits[ij.second]) e += c;
  return e;
}

namespace {

const IndexScheme& require_scheme(const Qubo& qubo) {
  if (!qubo.scheme()) {
    throw StructuralError("QUBO carries no (city, position) index scheme");
  }
  return *qubo.scheme();
}

}  // namespace

Sample encode_tour(const Qubo& qubo, const Tour& tour) {
  const IndexScheme& scheme = require_scheme(qubo);
  if (const auto check = validate_tour(scheme.num_cities(), tour.order);
      !check) {
    throw ValidationError(check.violation);
  }
  Sample sample;
  sample.bits.assign(scheme.num_vars(), 0);
  for (int p = 1; p < scheme.num_cities(); ++p) {
    sample.bits[scheme.index(tour.order[p], p)] = 1;
  }
  sample.energy = qubo_energy(qubo, sample.bits);
  return sample;
}

namespace {

ConstraintReport check_one_hot(const IndexScheme& scheme,
                               std::span<const Bit> bits) {
  ConstraintReport report;
  const int side = scheme.side();
  for (int p = 1; p <= side; ++p) {
    int count = 0;
    for (City c = 1; c <= side; ++c) count += bits[scheme.index(c, p)];
    if (count != 1)
      report.violations.push_back(
          {OneHotViolation::Group::kPosition, p + 1, count});
  }
  for (City c = 1; c <= side; ++c) {
    int count = 0;
    for (int p = 1; p <= side; ++p) count += bits[scheme.index(c, p)];
    if (count != 1)
      report.violations.push_back({OneHotViolation::Group::kCity, c + 1, count});
  }
  return report;
}

}  // namespace

std::string ConstraintReport::describe() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    const char* group =
        v.group == OneHotViolation::Group::kPosition ? "position" : "city";
    if (v.count == 0) {
      out += fmt::format("{} {} is empty", group, v.label);
    } else {
      out += fmt::format("{} {} has {} assignments", group, v.label, v.count);
    }
  }
  return out;
}

bool is_feasible(const Qubo& qubo, std::span<const Bit> bits) {
  if (!qubo.scheme() || static_cast<int>(bits.size()) != qubo.num_vars())
    return false;
  return check_one_hot(*qubo.scheme(), bits).violations.empty();
}

Decoded decode_sample(const Qubo& qubo, const Sample& sample,
                      const Instance& instance) {
  const IndexScheme& scheme = require_scheme(qubo);
  if (static_cast<int>(sample.bits.size()) != qubo.num_vars()) {
    throw StructuralError(fmt::format("sample has {} bits, QUBO has {}",
                                      sample.bits.size(), qubo.num_vars()));
  }
  if (instance.dimension() != scheme.num_cities()) {
    throw StructuralError("instance and QUBO disagree on the city count");
  }
  ConstraintReport report = check_one_hot(scheme, sample.bits);
  if (!report.violations.empty()) return report;

  Tour tour;
  tour.order.assign(scheme.num_cities(), 0);
  for (int v = 0; v < scheme.num_vars(); ++v) {
    if (sample.bits[v]) tour.order[scheme.position_of(v)] = scheme.city_of(v);
  }
  tour.length = tour_length(instance, tour.order);
  return tour;
}

void write_qubo_text(const Qubo& qubo, std::ostream& out) {
  out << fmt::format("offset {:.17g} num_vars {}", qubo.offset(),
                     qubo.num_vars());
  if (qubo.scheme()) out << " num_cities " << qubo.scheme()->num_cities();
  out << '\n';
  for (const auto& [i, c] : qubo.linear_terms())
    out << fmt::format("{} {} {:.17g}\n", i, i, c);
  for (const auto& [ij, c] : qubo.quadratic_terms())
    out << fmt::format("{} {} {:.17g}\n", ij.first, ij.second, c);
}

Qubo read_qubo_text(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("empty QUBO text");
  std::istringstream hs(header);
  std::string key;
  double offset = 0;
  int num_vars = 0;
  std::optional<IndexScheme> scheme;
  while (hs >> key) {
    if (key == "offset") {
      hs >> offset;
    } else if (key == "num_vars") {
      hs >> num_vars;
    } else if (key == "num_cities") {
      int cities = 0;
      hs >> cities;
      scheme = IndexScheme(cities);
    } else {
      throw ParseError(fmt::format("unknown QUBO header field '{}'", key));
    }
    if (!hs) throw ParseError("malformed QUBO header: " + header);
  }
  Qubo qubo(num_vars, scheme);
  qubo.add_offset(offset);
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    int i = 0, j = 0;
    double c = 0;
    if (!(ls >> i >> j >> c))
      throw ParseError(fmt::format("line {}: expected 'i j coeff'", line_no));
    qubo.add_quadratic(i, j, c);
  }
  return qubo;
}

}  // namespace qtsp
