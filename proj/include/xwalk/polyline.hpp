#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xwalk/geo.hpp"

namespace xwalk::polyline {

/// Quantization step used by the encoded-polyline format.
inline constexpr double kPrecision = 1e5;

/// Round half away from zero to the 1e-5 grid, as an integer count of steps.
std::int64_t quantize_steps(double degrees);
/// Value of a coordinate after 1e-5 quantization.
double quantize(double degrees);
GeoPoint quantize(const GeoPoint& p);

/// Throws DecodeError on characters outside [63, 126], a dangling
/// continuation chunk, an unpaired latitude, or out-of-range coordinates.
std::vector<GeoPoint> decode(std::string_view encoded);

/// Canonical (minimal-chunk) encoding of the quantized points.
std::string encode(std::span<const GeoPoint> points);

}  // namespace xwalk::polyline
