#include "qtsp/tsplib.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "qtsp/error.hpp"

namespace qtsp {

std::string_view to_string(ProblemKind kind) {
  return kind == ProblemKind::kSymmetric ? "TSP" : "ATSP";
}

std::string_view to_string(WeightType type) {
  switch (type) {
    case WeightType::kGeo:
      return "GEO";
    case WeightType::kEuc2d:
      return "EUC_2D";
    case WeightType::kExplicit:
      return "EXPLICIT";
  }
  return "?";
}

Distance DistanceMatrix::max_off_diagonal() const {
  Distance best = std::numeric_limits<Distance>::min();
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (i != j) best = std::max(best, (*this)(i, j));
  return best;
}

Distance DistanceMatrix::min_off_diagonal() const {
  Distance best = std::numeric_limits<Distance>::max();
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (i != j) best = std::min(best, (*this)(i, j));
  return best;
}

bool DistanceMatrix::is_symmetric() const {
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

// ----- Distances -----

namespace {

// TSPLIB95 uses this truncated constant; the published optima depend on it.
constexpr double kTsplibPi = 3.141592;
constexpr double kEarthRadius = 6378.388;

double geo_radians(double ddd_mm) {
  const double deg = std::trunc(ddd_mm);
  const double min = ddd_mm - deg;
  return kTsplibPi * (deg + 5.0 * min / 3.0) / 180.0;
}

}  // namespace

Distance geo_distance(GeoCoord a, GeoCoord b) {
  if (a.lat == b.lat && a.lon == b.lon) return 0;
  const double lat_a = geo_radians(a.lat), lon_a = geo_radians(a.lon);
  const double lat_b = geo_radians(b.lat), lon_b = geo_radians(b.lon);
  const double q1 = std::cos(lon_a - lon_b);
  const double q2 = std::cos(lat_a - lat_b);
  const double q3 = std::cos(lat_a + lat_b);
  const double arg = std::clamp(0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3),
                                -1.0, 1.0);
  return static_cast<Distance>(kEarthRadius * std::acos(arg) + 1.0);
}

Distance euc2d_distance(Point2 a, Point2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return static_cast<Distance>(std::lround(std::sqrt(dx * dx + dy * dy)));
}

// ----- Parsing -----

namespace {

enum class EdgeFormat {
  kFunction,
  kFullMatrix,
  kLowerDiagRow,
  kUpperRow,
  kUpperDiagRow
};

struct Line {
  int number = 0;
  std::string_view text;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  int number = 1;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t end = text.find('\n', pos);
    const size_t stop = end == std::string_view::npos ? text.size() : end;
    lines.push_back({number++, text.substr(pos, stop - pos)});
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

bool is_number(std::string_view token) {
  double unused;
  return parse_double(token, unused);
}

[[noreturn]] void fail_at(const Line& line, std::string_view what) {
  throw ParseError(fmt::format("line {}: {}: '{}'", line.number, what,
                               trim(line.text)));
}

// Keywords that are valid TSPLIB95 but out of this parser's scope.
bool is_unsupported_keyword(std::string_view key) {
  static constexpr std::string_view kKnown[] = {
      "CAPACITY",           "EDGE_DATA_FORMAT",    "EDGE_DATA_SECTION",
      "FIXED_EDGES_SECTION", "DISPLAY_DATA_SECTION", "TOUR_SECTION",
      "DEPOT_SECTION",      "DEMAND_SECTION"};
  return std::find(std::begin(kKnown), std::end(kKnown), key) !=
         std::end(kKnown);
}

size_t explicit_count(EdgeFormat format, size_t n) {
  switch (format) {
    case EdgeFormat::kFullMatrix:
      return n * n;
    case EdgeFormat::kLowerDiagRow:
    case EdgeFormat::kUpperDiagRow:
      return n * (n + 1) / 2;
    case EdgeFormat::kUpperRow:
      return n * (n - 1) / 2;
    case EdgeFormat::kFunction:
      break;
  }
  return 0;
}

Distance to_distance(std::string_view token, int line) {
  Distance value = 0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    double real = 0;
    if (!parse_double(token, real) || real != std::floor(real)) {
      throw ParseError(fmt::format(
          "line {}: edge weight '{}' is not an integer", line, token));
    }
    value = static_cast<Distance>(real);
  }
  if (value < 0) {
    throw StructuralError(
        fmt::format("line {}: negative edge weight {}", line, value));
  }
  return value;
}

struct Token {
  std::string_view text;
  int line = 0;
};

DistanceMatrix expand_explicit(EdgeFormat format, int n,
                               const std::vector<Token>& weights) {
  DistanceMatrix m(n);
  size_t k = 0;
  auto next = [&] {
    const Token& t = weights[k++];
    return to_distance(t.text, t.line);
  };
  switch (format) {
    case EdgeFormat::kFullMatrix:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = next();
      break;
    case EdgeFormat::kLowerDiagRow:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = next();
      break;
    case EdgeFormat::kUpperDiagRow:
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m(i, j) = m(j, i) = next();
      break;
    case EdgeFormat::kUpperRow:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) m(i, j) = m(j, i) = next();
      break;
    case EdgeFormat::kFunction:
      break;
  }
  return m;
}

}  // namespace

Instance parse_instance(std::string_view contents) {
  const std::vector<Line> lines = split_lines(contents);

  Instance instance;
  std::optional<int> dimension;
  std::optional<ProblemKind> kind;
  std::optional<WeightType> weight_type;
  std::optional<EdgeFormat> format;
  std::vector<Token> coord_tokens;
  std::vector<Token> weight_tokens;
  bool have_coords = false, have_weights = false;

  size_t i = 0;
  // Consumes numeric tokens following a section keyword, up to the next
  // keyword line or EOF.
  auto read_section = [&](std::vector<Token>& out) {
    for (++i; i < lines.size(); ++i) {
      const auto tokens = split_ws(lines[i].text);
      if (tokens.empty()) continue;
      if (!is_number(tokens.front())) break;
      for (auto t : tokens) {
        if (t == "EOF") {
          i = lines.size();
          return;
        }
        if (!is_number(t)) fail_at(lines[i], "non-numeric data");
        out.push_back({t, lines[i].number});
      }
    }
  };

  while (i < lines.size()) {
    const Line& line = lines[i];
    const std::string_view text = trim(line.text);
    if (text.empty()) {
      ++i;
      continue;
    }
    if (text == "EOF") break;

    std::string_view key, value;
    if (const auto colon = text.find(':'); colon != std::string_view::npos) {
      key = trim(text.substr(0, colon));
      value = trim(text.substr(colon + 1));
    } else {
      const auto tokens = split_ws(text);
      key = tokens.front();
      if (tokens.size() > 1) value = trim(text.substr(key.size()));
    }

    if (key == "NODE_COORD_SECTION") {
      have_coords = true;
      read_section(coord_tokens);
      continue;
    }
    if (key == "EDGE_WEIGHT_SECTION") {
      have_weights = true;
      read_section(weight_tokens);
      continue;
    }
    if (is_unsupported_keyword(key)) {
      throw UnsupportedFeature(
          fmt::format("line {}: unsupported TSPLIB keyword {}", line.number,
                      key));
    }
    if (value.empty() && key != "COMMENT") fail_at(line, "malformed header");

    if (key == "NAME") {
      instance.name = std::string(value);
    } else if (key == "COMMENT") {
    } else if (key == "TYPE") {
      if (value == "TSP") {
        kind = ProblemKind::kSymmetric;
      } else if (value == "ATSP") {
        kind = ProblemKind::kAsymmetric;
      } else {
        throw UnsupportedFeature(fmt::format(
            "line {}: unsupported problem TYPE {}", line.number, value));
      }
    } else if (key == "DIMENSION") {
      int n = 0;
      const auto [ptr, ec] =
          std::from_chars(value.data(), value.data() + value.size(), n);
      if (ec != std::errc() || ptr != value.data() + value.size())
        fail_at(line, "DIMENSION is not an integer");
      dimension = n;
    } else if (key == "EDGE_WEIGHT_TYPE") {
      if (value == "GEO") {
        weight_type = WeightType::kGeo;
      } else if (value == "EUC_2D") {
        weight_type = WeightType::kEuc2d;
      } else if (value == "EXPLICIT") {
        weight_type = WeightType::kExplicit;
      } else {
        throw UnsupportedFeature(fmt::format(
            "line {}: unsupported EDGE_WEIGHT_TYPE {}", line.number, value));
      }
    } else if (key == "EDGE_WEIGHT_FORMAT") {
      static const std::map<std::string_view, EdgeFormat> kFormats = {
          {"FUNCTION", EdgeFormat::kFunction},
          {"FULL_MATRIX", EdgeFormat::kFullMatrix},
          {"LOWER_DIAG_ROW", EdgeFormat::kLowerDiagRow},
          {"UPPER_ROW", EdgeFormat::kUpperRow},
          {"UPPER_DIAG_ROW", EdgeFormat::kUpperDiagRow}};
      const auto it = kFormats.find(value);
      if (it == kFormats.end()) {
        throw UnsupportedFeature(fmt::format(
            "line {}: unsupported EDGE_WEIGHT_FORMAT {}", line.number,
            value));
      }
      format = it->second;
    } else if (key == "DISPLAY_DATA_TYPE") {
      if (value == "TWOD_DISPLAY") {
        throw UnsupportedFeature(fmt::format(
            "line {}: DISPLAY_DATA_TYPE TWOD_DISPLAY is not supported",
            line.number));
      }
    } else if (key == "NODE_COORD_TYPE") {
      if (value != "TWOD_COORDS") {
        throw UnsupportedFeature(fmt::format(
            "line {}: unsupported NODE_COORD_TYPE {}", line.number, value));
      }
    } else {
      fail_at(line, "unknown keyword");
    }
    ++i;
  }

  if (!kind) throw ParseError("missing TYPE header");
  if (!dimension) throw ParseError("missing DIMENSION header");
  if (!weight_type) throw ParseError("missing EDGE_WEIGHT_TYPE header");
  const int n = *dimension;
  if (n < 3) {
    throw StructuralError(fmt::format("DIMENSION {} is below 3", n));
  }
  instance.kind = *kind;
  instance.weight_type = *weight_type;

  if (*weight_type == WeightType::kExplicit) {
    if (!format || *format == EdgeFormat::kFunction)
      throw ParseError("EXPLICIT weights need an EDGE_WEIGHT_FORMAT");
    if (!have_weights) throw StructuralError("missing EDGE_WEIGHT_SECTION");
    const size_t expected = explicit_count(*format, n);
    if (weight_tokens.size() != expected) {
      throw StructuralError(fmt::format(
          "EDGE_WEIGHT_SECTION has {} values, DIMENSION {} needs {}",
          weight_tokens.size(), n, expected));
    }
    instance.distances = expand_explicit(*format, n, weight_tokens);
  } else {
    if (format && *format != EdgeFormat::kFunction)
      throw ParseError("coordinate instances must use EDGE_WEIGHT_FORMAT FUNCTION");
    if (!have_coords) throw StructuralError("missing NODE_COORD_SECTION");
    if (coord_tokens.size() != static_cast<size_t>(3 * n)) {
      throw StructuralError(fmt::format(
          "NODE_COORD_SECTION has {} values, DIMENSION {} needs {}",
          coord_tokens.size(), n, 3 * n));
    }
    std::vector<std::optional<std::pair<double, double>>> coords(n);
    for (size_t k = 0; k < coord_tokens.size(); k += 3) {
      double id = 0, a = 0, b = 0;
      parse_double(coord_tokens[k].text, id);
      parse_double(coord_tokens[k + 1].text, a);
      parse_double(coord_tokens[k + 2].text, b);
      const int label = static_cast<int>(id);
      if (label != id || label < 1 || label > n || coords[label - 1]) {
        throw StructuralError(fmt::format("line {}: bad or repeated node id {}",
                                          coord_tokens[k].line,
                                          coord_tokens[k].text));
      }
      coords[label - 1] = std::make_pair(a, b);
    }
    DistanceMatrix m(n);
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) {
        const auto [ua, ub] = *coords[u];
        const auto [va, vb] = *coords[v];
        m(u, v) = *weight_type == WeightType::kGeo
                      ? geo_distance({ua, ub}, {va, vb})
                      : euc2d_distance({ua, ub}, {va, vb});
      }
    }
    instance.distances = std::move(m);
  }

  if (instance.kind == ProblemKind::kSymmetric &&
      !instance.distances.is_symmetric()) {
    throw StructuralError(
        fmt::format("{}: TYPE TSP but the distance matrix is asymmetric",
                    instance.name));
  }
  return instance;
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open {}", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_instance(buffer.str());
}

// ----- Tours -----

TourCheck validate_tour(const Instance& instance, std::span<const City> order) {
  return validate_tour(instance.dimension(), order);
}

TourCheck validate_tour(int n, std::span<const City> order) {
  if (static_cast<int>(order.size()) != n) {
    return {false, fmt::format("tour has {} cities, instance has {}",
                               order.size(), n)};
  }
  std::vector<bool> seen(n, false);
  for (City c : order) {
    if (c < 0 || c >= n) {
      return {false, fmt::format("city {} is out of range 1..{}", c + 1, n)};
    }
    if (seen[c]) return {false, fmt::format("duplicate city {}", c + 1)};
    seen[c] = true;
  }
  if (order.front() != 0) {
    return {false, fmt::format("city 1 is not in position 1 (found city {})",
                               order.front() + 1)};
  }
  return {};
}

Distance tour_length(const Instance& instance, std::span<const City> order) {
  const int n = instance.dimension();
  if (static_cast<int>(order.size()) != n) {
    throw ValidationError(fmt::format("tour has {} cities, instance has {}",
                                      order.size(), n));
  }
  std::vector<bool> seen(n, false);
  for (City c : order) {
    if (c < 0 || c >= n || seen[c])
      throw ValidationError("tour is not a permutation of the cities");
    seen[c] = true;
  }
  Distance total = 0;
  for (size_t k = 0; k < order.size(); ++k) {
    total += instance.distances(order[k], order[(k + 1) % order.size()]);
  }
  return total;
}

std::vector<City> to_one_based(std::span<const City> order) {
  std::vector<City> out(order.begin(), order.end());
  for (auto& c : out) ++c;
  return out;
}

std::vector<City> from_one_based(std::span<const City> labels) {
  std::vector<City> out(labels.begin(), labels.end());
  for (auto& c : out) --c;
  return out;
}

std::string format_tour(std::span<const City> order) {
  return fmt::format("{}", fmt::join(to_one_based(order), " "));
}

}  // namespace qtsp
