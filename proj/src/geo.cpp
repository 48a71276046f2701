#include "xwalk/geo.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

#include "xwalk/error.hpp"
#include "xwalk/io.hpp"

namespace xwalk {

bool is_valid(const GeoPoint& p) noexcept {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

GeoPoint GeoPoint::checked(double lat, double lon) {
  GeoPoint p{lat, lon};
  if (!is_valid(p))
    throw GeoError(fmt::format("coordinate out of range: ({}, {})", lat, lon));
  return p;
}

namespace {
// Web-Mercator stops at ~85.05; boxes beyond cannot be imaged.
constexpr double kPolarLimit = 85.0;
}  // namespace

BoundingBox::BoundingBox(double south, double west, double north, double east)
    : south_(south), west_(west), north_(north), east_(east) {
  GeoPoint::checked(south, west);
  GeoPoint::checked(north, east);
  if (!(south < north))
    throw GeoError(fmt::format("box requires south < north (got {} >= {})", south, north));
  if (!(west < east))
    throw GeoError(fmt::format(
        "box requires west < east (got {} >= {}); antimeridian-crossing boxes are not supported",
        west, east));
  if (south < -kPolarLimit || north > kPolarLimit)
    throw GeoError(fmt::format("polar box rejected: latitudes must stay within +/-{}", kPolarLimit));
}

double deg_distance(const GeoPoint& a, const GeoPoint& b) noexcept {
  return std::hypot(a.lat - b.lat, a.lon - b.lon);
}

double approx_meters(const GeoPoint& a, const GeoPoint& b) noexcept {
  const double mean_lat = (a.lat + b.lat) * 0.5 * std::numbers::pi / 180.0;
  const double dlat = a.lat - b.lat;
  const double dlon = (a.lon - b.lon) * std::cos(mean_lat);
  return kMetersPerDegree * std::sqrt(dlat * dlat + dlon * dlon);
}

namespace {

// Smallest count n such that extent / n <= max_extent in floating point.
std::size_t pieces(double extent, double max_extent) {
  auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(extent / max_extent)));
  while (n > 1 && extent / static_cast<double>(n - 1) <= max_extent) --n;
  while (extent / static_cast<double>(n) > max_extent) ++n;
  return n;
}

std::vector<double> edges(double lo, double hi, std::size_t n) {
  std::vector<double> e(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
  e.front() = lo;
  e.back() = hi;
  return e;
}

}  // namespace

std::vector<BoundingBox> split_region(const BoundingBox& box, double max_extent) {
  if (!(max_extent > 0.0)) throw GeoError("max_extent must be positive");
  const auto rows = pieces(box.height(), max_extent);
  const auto cols = pieces(box.width(), max_extent);
  if (rows == 1 && cols == 1) return {box};
  const auto lat_edges = edges(box.south(), box.north(), rows);
  const auto lon_edges = edges(box.west(), box.east(), cols);
  std::vector<BoundingBox> out;
  out.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      out.emplace_back(lat_edges[r], lon_edges[c], lat_edges[r + 1], lon_edges[c + 1]);
  return out;
}

bool contains(const BoundingBox& box, const GeoPoint& p) noexcept {
  return box.south() <= p.lat && p.lat <= box.north() && box.west() <= p.lon &&
         p.lon <= box.east();
}

std::string format_coord(double value, int decimals) {
  auto text = fmt::format("{:.{}f}", value, decimals);
  if (text.front() == '-' && text.find_first_not_of("-0.") == std::string::npos)
    text.erase(0, 1);
  return text;
}

std::vector<NamedRegion> parse_regions(std::string_view text) {
  std::vector<NamedRegion> regions;
  std::size_t line_no = 0;
  for (auto raw : io::split_lines(text)) {
    ++line_no;
    auto line = io::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = io::split_fields(line);
    if (fields.size() != 5)
      throw FormatError(fmt::format("regions line {}: expected name,south,west,north,east", line_no));
    auto name = std::string(io::trim(fields[0]));
    if (name.empty()) throw FormatError(fmt::format("regions line {}: empty name", line_no));
    regions.push_back({name, BoundingBox(io::parse_double(fields[1], "south"),
                                         io::parse_double(fields[2], "west"),
                                         io::parse_double(fields[3], "north"),
                                         io::parse_double(fields[4], "east"))});
  }
  return regions;
}

std::vector<NamedRegion> read_regions_file(const std::string& path) {
  return parse_regions(io::read_file(path));
}

}  // namespace xwalk
