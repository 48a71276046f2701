#include "xwalk/sampler.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <set>

#include "xwalk/error.hpp"
#include "xwalk/io.hpp"
#include "xwalk/log.hpp"
#include "xwalk/polyline.hpp"

namespace xwalk {

SpatialGrid::SpatialGrid(std::span<const GeoPoint> points, double cell_size)
    : cell_size_(cell_size), size_(points.size()) {
  if (!(cell_size > 0.0)) throw GeoError("grid cell size must be positive");
  for (const auto& p : points) cells_[cell_of(p)].push_back(p);
}

std::pair<std::int64_t, std::int64_t> SpatialGrid::cell_of(const GeoPoint& p) const noexcept {
  return {static_cast<std::int64_t>(std::floor(p.lat / cell_size_)),
          static_cast<std::int64_t>(std::floor(p.lon / cell_size_))};
}

std::optional<double> SpatialGrid::nearest_within(const GeoPoint& query, double radius) const {
  const auto ring = static_cast<std::int64_t>(std::ceil(radius / cell_size_));
  const auto [cy, cx] = cell_of(query);
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t dy = -ring; dy <= ring; ++dy) {
    for (std::int64_t dx = -ring; dx <= ring; ++dx) {
      auto it = cells_.find({cy + dy, cx + dx});
      if (it == cells_.end()) continue;
      for (const auto& p : it->second) best = std::min(best, deg_distance(query, p));
    }
  }
  if (best <= radius) return best;
  return std::nullopt;
}

std::vector<GeoPoint> SpatialGrid::points() const {
  std::vector<GeoPoint> out;
  out.reserve(size_);
  for (const auto& [cell, pts] : cells_) out.insert(out.end(), pts.begin(), pts.end());
  return out;
}

std::vector<GeoPoint> densify(std::span<const GeoPoint> path, double spacing) {
  if (!(spacing > 0.0)) throw GeoError("densify spacing must be positive");
  std::vector<GeoPoint> out;
  if (path.empty()) return out;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto& a = path[i];
    const auto& b = path[i + 1];
    out.push_back(a);
    const double length = deg_distance(a, b);
    // Interior points strictly before the end vertex; the slack keeps an
    // exact multiple of the spacing from producing a near-duplicate of b.
    const auto steps = static_cast<std::size_t>(std::max(0.0, std::ceil(length / spacing - 1e-9)));
    for (std::size_t k = 1; k < steps; ++k) {
      const double t = static_cast<double>(k) * spacing / length;
      out.push_back({a.lat + (b.lat - a.lat) * t, a.lon + (b.lon - a.lon) * t});
    }
  }
  out.push_back(path.back());
  return out;
}

std::vector<GeoPoint> dedupe(std::span<const GeoPoint> points) {
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  std::vector<GeoPoint> out;
  for (const auto& p : points) {
    if (seen.emplace(polyline::quantize_steps(p.lat), polyline::quantize_steps(p.lon)).second)
      out.push_back(polyline::quantize(p));
  }
  return out;
}

namespace {

// Slightly larger than the radius so a one-cell ring covers the closed
// radius even when the floor() of the cell index rounds unfavourably.
double grid_cell_for(double radius) { return radius * (1.0 + 1e-9); }

bool in_band(const std::optional<double>& nearest, const DistanceBand& band) {
  return nearest && band.min <= *nearest && *nearest <= band.max;
}

void check_band(const DistanceBand& band) {
  if (!(band.min > 0.0) || !(band.min < band.max))
    throw GeoError(fmt::format("invalid distance band [{}, {}]", band.min, band.max));
}

}  // namespace

std::vector<GeoPoint> filter_candidates(std::span<const GeoPoint> candidates,
                                        std::span<const GeoPoint> crosswalks,
                                        const BoundingBox& region, const DistanceBand& band) {
  check_band(band);
  if (crosswalks.empty()) {
    log::warn("no crosswalks known for region; every candidate is too far, keeping none");
    return {};
  }
  const SpatialGrid grid(crosswalks, grid_cell_for(band.max));
  std::vector<GeoPoint> kept;
  for (const auto& c : candidates) {
    if (contains(region, c) && in_band(grid.nearest_within(c, band.max), band)) kept.push_back(c);
  }
  return kept;
}

std::vector<NegativeSample> generate_negatives(std::span<const RoutePolyline> routes,
                                               std::span<const GeoPoint> crosswalks,
                                               const BoundingBox& region, double spacing,
                                               const DistanceBand& band) {
  check_band(band);
  std::vector<NegativeSample> out;
  if (routes.empty()) return out;

  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  std::vector<NegativeSample> candidates;
  for (const auto& route : routes) {
    const auto path = polyline::decode(route.encoded);
    for (const auto& p : densify(path, spacing)) {
      if (seen.emplace(polyline::quantize_steps(p.lat), polyline::quantize_steps(p.lon)).second)
        candidates.push_back({polyline::quantize(p), route.request_index});
    }
  }
  if (crosswalks.empty()) {
    log::warn("no crosswalks known for region; every candidate is too far, keeping none");
    return out;
  }
  const SpatialGrid grid(crosswalks, grid_cell_for(band.max));
  for (const auto& c : candidates) {
    if (contains(region, c.location) && in_band(grid.nearest_within(c.location, band.max), band))
      out.push_back(c);
  }
  return out;
}

std::string format_negatives_csv(std::span<const NegativeSample> negatives) {
  std::string out = "lat,lon,source_route_index\n";
  for (const auto& n : negatives)
    out += fmt::format("{},{},{}\n", format_coord(n.location.lat), format_coord(n.location.lon),
                       n.source_route_index);
  return out;
}

std::vector<NegativeSample> parse_negatives_csv(std::string_view text) {
  std::vector<NegativeSample> out;
  const auto lines = io::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (io::trim(lines[i]).empty()) continue;
    if (i == 0 && lines[i].starts_with("lat")) continue;
    const auto f = io::split_fields(lines[i]);
    if (f.size() != 3)
      throw FormatError(fmt::format("negatives line {}: expected lat,lon,source_route_index", i + 1));
    const auto index = io::parse_int(f[2], "source_route_index");
    if (index < 0) throw FormatError(fmt::format("negatives line {}: negative route index", i + 1));
    out.push_back({GeoPoint::checked(io::parse_double(f[0], "lat"), io::parse_double(f[1], "lon")),
                   static_cast<std::size_t>(index)});
  }
  return out;
}

}  // namespace xwalk
