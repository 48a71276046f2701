#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xwalk {

/// WGS84 location in decimal degrees.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  /// Throws GeoError when outside [-90, 90] x [-180, 180] or not finite.
  static GeoPoint checked(double lat, double lon);

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(const GeoPoint& p) noexcept;

/// Axis-aligned south/west/north/east region. Construction validates, so a
/// BoundingBox value always satisfies south < north and west < east.
class BoundingBox {
 public:
  BoundingBox(double south, double west, double north, double east);

  double south() const noexcept { return south_; }
  double west() const noexcept { return west_; }
  double north() const noexcept { return north_; }
  double east() const noexcept { return east_; }
  double height() const noexcept { return north_ - south_; }
  double width() const noexcept { return east_ - west_; }
  double area() const noexcept { return height() * width(); }
  GeoPoint south_west() const noexcept { return {south_, west_}; }
  GeoPoint north_east() const noexcept { return {north_, east_}; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

 private:
  double south_, west_, north_, east_;
};

/// A region of interest as read from the regions file.
struct NamedRegion {
  std::string name;
  BoundingBox box;
};

inline constexpr double kDefaultMaxExtent = 0.25;
inline constexpr double kMetersPerDegree = 111320.0;

/// Euclidean distance in degree space.
double deg_distance(const GeoPoint& a, const GeoPoint& b) noexcept;

/// Equirectangular approximation, for reporting only.
double approx_meters(const GeoPoint& a, const GeoPoint& b) noexcept;

/// Row-major grid (from the south-west corner) of sub-boxes whose extents
/// never exceed `max_extent`. Edges are shared exactly between neighbours.
std::vector<BoundingBox> split_region(const BoundingBox& box,
                                      double max_extent = kDefaultMaxExtent);

/// Closed containment.
bool contains(const BoundingBox& box, const GeoPoint& p) noexcept;

/// Fixed-decimal coordinate text; never emits "-0.000...".
std::string format_coord(double value, int decimals = 7);

/// Parses `name,south,west,north,east` lines. Blank lines and lines starting
/// with '#' are skipped.
std::vector<NamedRegion> parse_regions(std::string_view text);
std::vector<NamedRegion> read_regions_file(const std::string& path);

}  // namespace xwalk
