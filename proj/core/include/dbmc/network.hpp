#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dbmc/diffusion_kernel.hpp"
#include "dbmc/matrix.hpp"

namespace dbmc {

using Point = std::vector<double>;

// Node positions in an m-dimensional free medium. Immutable once built; the
// constructor enforces N >= 1, matching dimensions and distinct positions.
//
// A geometry may carry a period along the first axis, in which case
// distances along that axis are measured on a ring (the wrapped line).
class NetworkGeometry {
 public:
  NetworkGeometry(std::vector<Point> positions, MediumParams medium,
                  std::optional<double> spacing = std::nullopt,
                  std::optional<double> period = std::nullopt);

  std::size_t size() const noexcept { return positions_.size(); }
  const std::vector<Point>& positions() const noexcept { return positions_; }
  const Point& position(std::size_t i) const { return positions_.at(i); }
  const MediumParams& medium() const noexcept { return medium_; }
  std::optional<double> spacing() const noexcept { return spacing_; }
  std::optional<double> period() const noexcept { return period_; }

  double distance(std::size_t i, std::size_t j) const;
  // Distance from node i to an arbitrary point (no wrapping).
  double distance_to(std::size_t i, const Point& p) const;

 private:
  std::vector<Point> positions_;
  MediumParams medium_;
  std::optional<double> spacing_;
  std::optional<double> period_;
};

// Symmetric, zero diagonal, positive off-diagonal.
struct DistanceMatrix {
  Matrix entries;
};

DistanceMatrix distance_matrix(const NetworkGeometry& geometry);

// Nodes at 0, a, ..., (N-1)a on the first axis.
NetworkGeometry line_network(std::size_t n, double spacing, const MediumParams& medium);

// N nodes spaced a apart on a ring of circumference N a. Every node sees the
// same neighbour distances, so column sums of X coincide.
NetworkGeometry wrapped_line_network(std::size_t n, double spacing, const MediumParams& medium);

// rows x cols lattice, node r*cols + c at (c a, r a). With m = 1 only a
// single row or column is representable.
NetworkGeometry grid_network(std::size_t rows, std::size_t cols, double spacing,
                             const MediumParams& medium);

// N nodes drawn uniformly (and reproducibly from `seed`) from the ball of
// `cluster_radius` about the origin. The origin is the network centre used
// for the one-shot consensus rates.
NetworkGeometry compact_cluster(std::size_t n, double cluster_radius, const MediumParams& medium,
                                std::uint64_t seed);

// True when cluster_radius is at most a tenth of the sensing length
// sqrt(4 D T0); callers warn otherwise.
bool cluster_is_compact(double cluster_radius, const MediumParams& medium, double horizon);

struct EffectiveRadiusReport {
  double radius = 0.0;       // R
  double peak_radius = 0.0;  // argmax of r X(r)
  double epsilon = 0.0;
  // round(pi R^2 d) for the density form, or max over nodes of the literal
  // within-R count for a concrete geometry; always <= N - 1 in that case.
  int neighbor_count = 0;
  std::vector<int> per_node;  // empty for the density form
};

// Smallest radius beyond the peak at which r X(r) / max_r r X(r) drops
// below epsilon, with X the cumulative response over `horizon`.
// Throws DegenerateRadiusError for epsilon >= 1, ValidationError for
// epsilon <= 0.
double effective_radius_value(const MediumParams& medium, double horizon, double epsilon,
                              double* peak_radius = nullptr);

// Density form (m = 2 only): N' = round(pi R^2 d).
EffectiveRadiusReport effective_radius(const MediumParams& medium, double horizon,
                                       double density, double epsilon);

// Concrete-geometry form: counts neighbours within R for every node.
EffectiveRadiusReport effective_radius(const NetworkGeometry& geometry, double horizon,
                                       double epsilon);

std::vector<int> neighbors_within(const NetworkGeometry& geometry, double radius);

// JSON geometry document:
//   {"medium": {"m": 2, "D": 1.0, "node_radius": 0.1},
//    "positions": [[0, 0], [1, 0]],
//    "a": 1.0,          // optional spacing hint
//    "period": 2.0}     // optional ring period along the first axis
// Validation errors carry the field path.
NetworkGeometry load_geometry(std::string_view document);
std::string save_geometry(const NetworkGeometry& geometry);

}  // namespace dbmc
