#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xwalk/directions_client.hpp"
#include "xwalk/geo.hpp"

namespace xwalk {

inline constexpr double kDefaultSpacing = 1.5e-4;
inline constexpr double kDefaultMinDistance = 3e-4;
inline constexpr double kDefaultMaxDistance = 6e-4;

/// Closed band [min, max] on the distance to the nearest crosswalk.
struct DistanceBand {
  double min = kDefaultMinDistance;
  double max = kDefaultMaxDistance;
};

/// Uniform-cell bucket index over points in degree space.
class SpatialGrid {
 public:
  SpatialGrid(std::span<const GeoPoint> points, double cell_size);

  double cell_size() const noexcept { return cell_size_; }
  std::size_t size() const noexcept { return size_; }

  /// Smallest distance to an indexed point, if one lies within `radius`.
  std::optional<double> nearest_within(const GeoPoint& query, double radius) const;

  /// Every indexed point, in cell order (for invariant checks).
  std::vector<GeoPoint> points() const;

 private:
  struct CellHash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& c) const noexcept {
      return std::hash<std::int64_t>{}(c.first * 0x9E3779B97F4A7C15LL ^ c.second);
    }
  };
  std::pair<std::int64_t, std::int64_t> cell_of(const GeoPoint& p) const noexcept;

  double cell_size_;
  std::size_t size_ = 0;
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::vector<GeoPoint>, CellHash> cells_;
};

/// Start vertex of each segment plus points every `spacing` along it, then
/// the final vertex.
std::vector<GeoPoint> densify(std::span<const GeoPoint> path, double spacing = kDefaultSpacing);

/// Snaps to the 1e-5 grid and keeps the first occurrence of each cell.
std::vector<GeoPoint> dedupe(std::span<const GeoPoint> points);

/// Keeps candidates inside `region` whose nearest crosswalk lies in `band`.
/// An empty crosswalk set logs a warning and keeps nothing.
std::vector<GeoPoint> filter_candidates(std::span<const GeoPoint> candidates,
                                        std::span<const GeoPoint> crosswalks,
                                        const BoundingBox& region, const DistanceBand& band = {});

struct NegativeSample {
  GeoPoint location;
  std::size_t source_route_index = 0;

  friend bool operator==(const NegativeSample&, const NegativeSample&) = default;
};

/// decode -> densify -> dedupe -> band/containment filter, in route order.
std::vector<NegativeSample> generate_negatives(std::span<const RoutePolyline> routes,
                                               std::span<const GeoPoint> crosswalks,
                                               const BoundingBox& region,
                                               double spacing = kDefaultSpacing,
                                               const DistanceBand& band = {});

/// `lat,lon,source_route_index` with a header row.
std::string format_negatives_csv(std::span<const NegativeSample> negatives);
std::vector<NegativeSample> parse_negatives_csv(std::string_view text);

}  // namespace xwalk
