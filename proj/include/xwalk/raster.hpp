#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xwalk {

/// 8-bit RGB, rows top to bottom.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height);
  RasterImage(int width, int height, std::vector<std::uint8_t> rgb);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const std::uint8_t> data() const noexcept { return rgb_; }
  std::span<std::uint8_t> data() noexcept { return rgb_; }
  std::span<const std::uint8_t> row(int y) const;
  std::span<std::uint8_t> row(int y);

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> rgb_;
};

/// Rows of the logo/copyright strip at the bottom of each tile.
inline constexpr int kLogoStripRows = 25;
inline constexpr int kRawTileWidth = 200;
inline constexpr int kRawTileHeight = 225;

/// Drops the bottom logo strip: 200x225 -> 200x200. Any other input shape
/// is a ShapeError.
RasterImage preprocess(const RasterImage& image);

/// PNG of any colour type/bit depth, converted to 8-bit RGB.
RasterImage decode_png(std::string_view bytes);
std::string encode_png(const RasterImage& image);

}  // namespace xwalk
