#include "dbmc/network.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dbmc/errors.hpp"
#include "dbmc/rng.hpp"

namespace dbmc {

using json = nlohmann::json;

NetworkGeometry::NetworkGeometry(std::vector<Point> positions, MediumParams medium,
                                 std::optional<double> spacing, std::optional<double> period)
    : positions_(std::move(positions)), medium_(medium), spacing_(spacing), period_(period) {
  medium_.validate();
  if (positions_.empty()) throw ValidationError("positions", "at least one node is required");
  if (spacing_ && !(*spacing_ > 0.0)) throw ValidationError("a", "spacing must be positive");
  if (period_ && !(*period_ > 0.0)) throw ValidationError("period", "period must be positive");

  const auto m = static_cast<std::size_t>(medium_.dimension);
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    const std::string path = "positions[" + std::to_string(i) + "]";
    if (positions_[i].size() != m) {
      throw ValidationError(path, "expected " + std::to_string(m) + " coordinates, got " +
                                      std::to_string(positions_[i].size()));
    }
    for (double c : positions_[i]) {
      if (!std::isfinite(c)) throw ValidationError(path, "coordinate is not finite");
    }
  }
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    for (std::size_t j = i + 1; j < positions_.size(); ++j) {
      if (!(distance(i, j) > 0.0)) {
        throw ValidationError("positions[" + std::to_string(j) + "]",
                              "coincides with positions[" + std::to_string(i) + "]");
      }
    }
  }
}

double NetworkGeometry::distance(std::size_t i, std::size_t j) const {
  const Point& p = positions_.at(i);
  const Point& q = positions_.at(j);
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    double d = std::abs(p[k] - q[k]);
    if (k == 0 && period_) {
      d = std::fmod(d, *period_);
      d = std::min(d, *period_ - d);
    }
    sum += d * d;
  }
  return std::sqrt(sum);
}

double NetworkGeometry::distance_to(std::size_t i, const Point& p) const {
  const Point& q = positions_.at(i);
  double sum = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) sum += (q[k] - p[k]) * (q[k] - p[k]);
  return std::sqrt(sum);
}

DistanceMatrix distance_matrix(const NetworkGeometry& geometry) {
  const std::size_t n = geometry.size();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = geometry.distance(i, j);
    }
  }
  return DistanceMatrix{std::move(d)};
}

namespace {

void require_nodes(std::size_t n, const char* path) {
  if (n < 1) throw ValidationError(path, "must be at least 1");
}

void require_spacing(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("geometry.a", "spacing must be positive");
}

std::vector<Point> line_positions(std::size_t n, double spacing, int dimension) {
  std::vector<Point> positions(n, Point(static_cast<std::size_t>(dimension), 0.0));
  for (std::size_t i = 0; i < n; ++i) positions[i][0] = static_cast<double>(i) * spacing;
  return positions;
}

}  // namespace

NetworkGeometry line_network(std::size_t n, double spacing, const MediumParams& medium) {
  require_nodes(n, "geometry.N");
  require_spacing(spacing);
  return NetworkGeometry(line_positions(n, spacing, medium.dimension), medium, spacing);
}

NetworkGeometry wrapped_line_network(std::size_t n, double spacing, const MediumParams& medium) {
  require_nodes(n, "geometry.N");
  require_spacing(spacing);
  return NetworkGeometry(line_positions(n, spacing, medium.dimension), medium, spacing,
                         static_cast<double>(n) * spacing);
}

NetworkGeometry grid_network(std::size_t rows, std::size_t cols, double spacing,
                             const MediumParams& medium) {
  require_nodes(rows, "geometry.rows");
  require_nodes(cols, "geometry.cols");
  require_spacing(spacing);
  if (medium.dimension == 1) {
    if (rows > 1 && cols > 1) {
      throw ValidationError("medium.m", "a grid with rows > 1 and cols > 1 needs m >= 2");
    }
    return line_network(rows * cols, spacing, medium);
  }
  std::vector<Point> positions;
  positions.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      Point p(static_cast<std::size_t>(medium.dimension), 0.0);
      p[0] = static_cast<double>(c) * spacing;
      p[1] = static_cast<double>(r) * spacing;
      positions.push_back(std::move(p));
    }
  }
  return NetworkGeometry(std::move(positions), medium, spacing);
}

NetworkGeometry compact_cluster(std::size_t n, double cluster_radius, const MediumParams& medium,
                                std::uint64_t seed) {
  require_nodes(n, "geometry.N");
  if (!(cluster_radius > 0.0)) {
    throw ValidationError("geometry.cluster_radius", "cluster radius must be positive");
  }
  const auto m = static_cast<std::size_t>(medium.dimension);
  Rng rng(seed, /*stream=*/0x636c7573ULL);
  std::vector<Point> positions;
  positions.reserve(n);
  while (positions.size() < n) {
    Point p(m);
    double r2 = 0.0;
    for (auto& c : p) {
      c = rng.uniform(-1.0, 1.0);
      r2 += c * c;
    }
    if (r2 > 1.0) continue;
    for (auto& c : p) c *= cluster_radius;
    positions.push_back(std::move(p));
  }
  return NetworkGeometry(std::move(positions), medium);
}

bool cluster_is_compact(double cluster_radius, const MediumParams& medium, double horizon) {
  return cluster_radius <= 0.1 * std::sqrt(4.0 * medium.diffusion_coefficient * horizon);
}

double effective_radius_value(const MediumParams& medium, double horizon, double epsilon,
                              double* peak_radius) {
  medium.validate();
  if (!(horizon > 0.0)) throw DomainError("effective_radius: horizon must be positive");
  if (!(epsilon > 0.0)) throw ValidationError("matrix.epsilon", "epsilon must be in (0, 1)");
  if (epsilon >= 1.0) {
    throw DegenerateRadiusError(
        "effective_radius: the normalized ring factor never exceeds epsilon >= 1");
  }

  const double length = std::sqrt(4.0 * medium.diffusion_coefficient * horizon);
  auto ring = [&](double r) { return r * cumulative_response(r, horizon, medium).value; };

  double peak_r = 0.0;
  double peak = 0.0;
  if (medium.dimension == 3) {
    // r X(r) = erfc(r / L) / (4 pi D) decreases from its r -> 0 limit.
    peak = 1.0 / (4.0 * std::numbers::pi * medium.diffusion_coefficient);
  } else {
    // Unimodal for m = 1, 2; golden-section search on [0, 3L].
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0;
    double hi = 3.0 * length;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = ring(x1);
    double f2 = ring(x2);
    while (hi - lo > 1e-10 * length) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = ring(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = ring(x1);
      }
    }
    peak_r = 0.5 * (lo + hi);
    peak = ring(peak_r);
  }
  if (peak_radius) *peak_radius = peak_r;

  auto factor = [&](double r) { return ring(r) / peak; };
  double lo = peak_r;
  double hi = std::max(peak_r, length);
  while (factor(hi) >= epsilon) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6 * length) {
      throw DegenerateRadiusError("effective_radius: ring factor does not fall below epsilon");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (factor(mid) < epsilon) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

EffectiveRadiusReport effective_radius(const MediumParams& medium, double horizon,
                                       double density, double epsilon) {
  if (medium.dimension != 2) {
    throw ValidationError("medium.m",
                          "the density form N' = pi R^2 d applies to m = 2; "
                          "use the geometry form for other dimensions");
  }
  if (!(density > 0.0)) throw ValidationError("matrix.density", "density must be positive");
  EffectiveRadiusReport report;
  report.epsilon = epsilon;
  report.radius = effective_radius_value(medium, horizon, epsilon, &report.peak_radius);
  report.neighbor_count = static_cast<int>(
      std::lround(std::numbers::pi * report.radius * report.radius * density));
  return report;
}

std::vector<int> neighbors_within(const NetworkGeometry& geometry, double radius) {
  const std::size_t n = geometry.size();
  std::vector<int> counts(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && geometry.distance(i, j) <= radius) ++counts[i];
    }
  }
  return counts;
}

EffectiveRadiusReport effective_radius(const NetworkGeometry& geometry, double horizon,
                                       double epsilon) {
  EffectiveRadiusReport report;
  report.epsilon = epsilon;
  report.radius =
      effective_radius_value(geometry.medium(), horizon, epsilon, &report.peak_radius);
  report.per_node = neighbors_within(geometry, report.radius);
  report.neighbor_count = report.per_node.empty()
                              ? 0
                              : *std::max_element(report.per_node.begin(), report.per_node.end());
  return report;
}

namespace {

double read_number(const json& node, const std::string& path) {
  if (!node.is_number()) throw ValidationError(path, "expected a number");
  return node.get<double>();
}

}  // namespace

NetworkGeometry load_geometry(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ValidationError("", std::string("malformed geometry document: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("", "geometry document must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "medium" && key != "positions" && key != "a" && key != "period") {
      throw ValidationError(key, "unknown key");
    }
  }

  if (!doc.contains("medium") || !doc["medium"].is_object()) {
    throw ValidationError("medium", "required object is missing");
  }
  MediumParams medium;
  const json& med = doc["medium"];
  for (const auto& [key, _] : med.items()) {
    if (key != "m" && key != "D" && key != "node_radius") {
      throw ValidationError("medium." + key, "unknown key");
    }
  }
  for (const char* key : {"m", "D", "node_radius"}) {
    if (!med.contains(key)) throw ValidationError(std::string("medium.") + key, "required key is missing");
  }
  if (!med["m"].is_number_integer()) throw ValidationError("medium.m", "expected an integer");
  medium.dimension = med["m"].get<int>();
  medium.diffusion_coefficient = read_number(med["D"], "medium.D");
  medium.node_radius = read_number(med["node_radius"], "medium.node_radius");
  medium.validate();

  if (!doc.contains("positions") || !doc["positions"].is_array()) {
    throw ValidationError("positions", "required array is missing");
  }
  std::vector<Point> positions;
  const json& pos = doc["positions"];
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const std::string path = "positions[" + std::to_string(i) + "]";
    if (!pos[i].is_array()) throw ValidationError(path, "expected a coordinate array");
    Point p;
    for (std::size_t k = 0; k < pos[i].size(); ++k) {
      p.push_back(read_number(pos[i][k], path + "[" + std::to_string(k) + "]"));
    }
    positions.push_back(std::move(p));
  }

  std::optional<double> spacing;
  std::optional<double> period;
  if (doc.contains("a")) spacing = read_number(doc["a"], "a");
  if (doc.contains("period")) period = read_number(doc["period"], "period");
  return NetworkGeometry(std::move(positions), medium, spacing, period);
}

std::string save_geometry(const NetworkGeometry& geometry) {
  json doc;
  doc["medium"] = {{"m", geometry.medium().dimension},
                   {"D", geometry.medium().diffusion_coefficient},
                   {"node_radius", geometry.medium().node_radius}};
  doc["positions"] = geometry.positions();
  if (geometry.spacing()) doc["a"] = *geometry.spacing();
  if (geometry.period()) doc["period"] = *geometry.period();
  return doc.dump(2);
}

}  // namespace dbmc
