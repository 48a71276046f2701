#include "xwalk/polyline.hpp"

#include <cmath>

#include "xwalk/error.hpp"

namespace xwalk::polyline {

std::int64_t quantize_steps(double degrees) { return std::llround(degrees * kPrecision); }

double quantize(double degrees) {
  return static_cast<double>(quantize_steps(degrees)) / kPrecision;
}

GeoPoint quantize(const GeoPoint& p) { return {quantize(p.lat), quantize(p.lon)}; }

namespace {

// Valid deltas fit in 6 chunks; 7 leaves headroom while keeping sums far from overflow.
constexpr int kMaxChunks = 7;

void append_value(std::string& out, std::int64_t value) {
  auto folded = static_cast<std::uint64_t>(value) << 1;
  if (value < 0) folded = ~folded;
  while (folded >= 0x20) {
    out.push_back(static_cast<char>((0x20 | (folded & 0x1f)) + 63));
    folded >>= 5;
  }
  out.push_back(static_cast<char>(folded + 63));
}

std::int64_t read_value(std::string_view text, std::size_t& pos) {
  std::uint64_t result = 0;
  int shift = 0;
  for (int chunk = 0;; ++chunk) {
    if (pos >= text.size())
      throw DecodeError("truncated polyline: continuation bit set on final chunk");
    if (chunk == kMaxChunks) throw DecodeError("polyline value too long at offset " + std::to_string(pos));
    const int c = static_cast<unsigned char>(text[pos]);
    if (c < 63 || c > 126)
      throw DecodeError("invalid polyline character at offset " + std::to_string(pos));
    ++pos;
    const auto bits = static_cast<std::uint64_t>(c - 63);
    result |= (bits & 0x1f) << shift;
    shift += 5;
    if (bits < 0x20) break;
  }
  const auto magnitude = static_cast<std::int64_t>(result >> 1);
  return (result & 1) ? ~magnitude : magnitude;
}

}  // namespace

std::vector<GeoPoint> decode(std::string_view encoded) {
  std::vector<GeoPoint> points;
  std::size_t pos = 0;
  std::int64_t lat = 0;
  std::int64_t lon = 0;
  while (pos < encoded.size()) {
    lat += read_value(encoded, pos);
    if (pos >= encoded.size()) throw DecodeError("truncated polyline: latitude without longitude");
    lon += read_value(encoded, pos);
    GeoPoint p{static_cast<double>(lat) / kPrecision, static_cast<double>(lon) / kPrecision};
    if (!is_valid(p))
      throw DecodeError("decoded coordinate out of range at point " + std::to_string(points.size()));
    points.push_back(p);
  }
  return points;
}

std::string encode(std::span<const GeoPoint> points) {
  std::string out;
  std::int64_t prev_lat = 0;
  std::int64_t prev_lon = 0;
  for (const auto& p : points) {
    const auto lat = quantize_steps(p.lat);
    const auto lon = quantize_steps(p.lon);
    append_value(out, lat - prev_lat);
    append_value(out, lon - prev_lon);
    prev_lat = lat;
    prev_lon = lon;
  }
  return out;
}

}  // namespace xwalk::polyline
