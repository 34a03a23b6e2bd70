#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qtsp {

enum class ProblemKind { kSymmetric, kAsymmetric };
enum class WeightType { kGeo, kEuc2d, kExplicit };

std::string_view to_string(ProblemKind kind);
std::string_view to_string(WeightType type);

// Cities are 0-based inside the library. Everything that crosses the parser
// or a report boundary is 1-based.
using City = int;
using Distance = std::int64_t;

// Dense N x N distance matrix, row-major. Diagonal entries are stored as read
// but never take part in any computation.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(int n) : n_(n), data_(static_cast<size_t>(n) * n) {}

  int size() const { return n_; }
  Distance operator()(City from, City to) const {
    return data_[static_cast<size_t>(from) * n_ + to];
  }
  Distance& operator()(City from, City to) {
    return data_[static_cast<size_t>(from) * n_ + to];
  }

  Distance max_off_diagonal() const;
  Distance min_off_diagonal() const;
  bool is_symmetric() const;

  bool operator==(const DistanceMatrix&) const = default;

 private:
  int n_ = 0;
  std::vector<Distance> data_;
};

struct Instance {
  std::string name;
  ProblemKind kind = ProblemKind::kSymmetric;
  WeightType weight_type = WeightType::kExplicit;
  DistanceMatrix distances;

  int dimension() const { return distances.size(); }
};

// A closed tour anchored at city 0 (city 1 externally).
struct Tour {
  std::vector<City> order;
  Distance length = 0;

  bool operator==(const Tour&) const = default;
};

struct GeoCoord {
  double lat = 0;  // DDD.MM
  double lon = 0;
};

struct Point2 {
  double x = 0;
  double y = 0;
};

Instance parse_instance(std::string_view contents);
Instance load_instance(const std::filesystem::path& path);

// TSPLIB95 GEO distance (coordinates in degree.minute notation).
Distance geo_distance(GeoCoord a, GeoCoord b);
// TSPLIB95 EUC_2D distance: nint of the Euclidean distance.
Distance euc2d_distance(Point2 a, Point2 b);

// Closed-loop length with directed legs. `order` must be a permutation of
// 0..N-1; throws ValidationError otherwise.
Distance tour_length(const Instance& instance, std::span<const City> order);

struct TourCheck {
  bool valid = true;
  std::string violation;

  explicit operator bool() const { return valid; }
};

TourCheck validate_tour(const Instance& instance, std::span<const City> order);
TourCheck validate_tour(int num_cities, std::span<const City> order);

// Conversions at the 1-based boundary.
std::vector<City> to_one_based(std::span<const City> order);
std::vector<City> from_one_based(std::span<const City> labels);
std::string format_tour(std::span<const City> order);

}  // namespace qtsp
