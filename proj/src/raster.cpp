#include "xwalk/raster.hpp"

#include <png.h>

#include <cstring>

#include "xwalk/error.hpp"

namespace xwalk {

RasterImage::RasterImage(int width, int height)
    : RasterImage(width, height,
                  std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                            static_cast<std::size_t>(std::max(height, 0)) * 3)) {}

RasterImage::RasterImage(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), rgb_(std::move(rgb)) {
  if (width < 0 || height < 0) throw ShapeError("negative image dimensions");
  if (rgb_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3)
    throw ShapeError("pixel buffer length does not match width x height x 3");
}

std::span<const std::uint8_t> RasterImage::row(int y) const {
  if (y < 0 || y >= height_) throw ShapeError("row index out of range");
  const auto stride = static_cast<std::size_t>(width_) * 3;
  return std::span<const std::uint8_t>(rgb_).subspan(static_cast<std::size_t>(y) * stride, stride);
}

std::span<std::uint8_t> RasterImage::row(int y) {
  if (y < 0 || y >= height_) throw ShapeError("row index out of range");
  const auto stride = static_cast<std::size_t>(width_) * 3;
  return std::span<std::uint8_t>(rgb_).subspan(static_cast<std::size_t>(y) * stride, stride);
}

RasterImage preprocess(const RasterImage& image) {
  if (image.width() != kRawTileWidth || image.height() != kRawTileHeight)
    throw ShapeError("preprocess expects a " + std::to_string(kRawTileWidth) + "x" +
                     std::to_string(kRawTileHeight) + " tile, got " + std::to_string(image.width()) +
                     "x" + std::to_string(image.height()));
  const int out_height = image.height() - kLogoStripRows;
  const auto bytes = static_cast<std::size_t>(image.width()) * 3 * static_cast<std::size_t>(out_height);
  std::vector<std::uint8_t> kept(image.data().begin(),
                                 image.data().begin() + static_cast<std::ptrdiff_t>(bytes));
  return RasterImage(image.width(), out_height, std::move(kept));
}

namespace {

struct ReadCursor {
  std::string_view bytes;
  std::size_t offset = 0;
};

void read_callback(png_structp png, png_bytep out, png_size_t length) {
  auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cursor->offset + length > cursor->bytes.size()) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, cursor->bytes.data() + cursor->offset, length);
  cursor->offset += length;
}

void write_callback(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), length);
}

void flush_callback(png_structp) {}

void error_callback(png_structp png, png_const_charp message) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  if (text) *text = message;
  png_longjmp(png, 1);
}

void warning_callback(png_structp, png_const_charp) {}

struct DecodeState {
  ReadCursor cursor;
  std::string error;
  std::vector<std::uint8_t> rgb;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
};

// Only pointers live in this frame, so nothing is clobbered by longjmp.
bool read_png(png_structp png, png_infop info, DecodeState* state) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_read_fn(png, &state->cursor, read_callback);
  png_read_info(png, info);
  state->width = png_get_image_width(png, info);
  state->height = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  if (png_get_rowbytes(png, info) != static_cast<png_size_t>(state->width) * 3)
    png_error(png, "unexpected row layout after conversion");
  state->rgb.resize(static_cast<std::size_t>(state->width) * state->height * 3);
  state->rows.resize(state->height);
  for (png_uint_32 y = 0; y < state->height; ++y)
    state->rows[y] = state->rgb.data() + static_cast<std::size_t>(y) * state->width * 3;
  png_read_image(png, state->rows.data());
  png_read_end(png, nullptr);
  return true;
}

bool write_png(png_structp png, png_infop info, const RasterImage* image, std::string* out,
               std::vector<png_const_bytep>* rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_write_fn(png, out, write_callback, flush_callback);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image->width()), static_cast<png_uint_32>(image->height()),
               8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_rows(png, const_cast<png_bytepp>(rows->data()), static_cast<png_uint_32>(rows->size()));
  png_write_end(png, nullptr);
  return true;
}

}  // namespace

RasterImage decode_png(std::string_view bytes) {
  if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0)
    throw ImageError("not a PNG image");
  DecodeState state{{bytes, 0}, {}, {}, {}, 0, 0};
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &state.error, error_callback, warning_callback);
  if (!png) throw ImageError("libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw ImageError("libpng initialisation failed");
  }
  const bool ok = read_png(png, info, &state);
  png_destroy_read_struct(&png, &info, nullptr);
  if (!ok) throw ImageError("PNG decode failed: " + state.error);
  return RasterImage(static_cast<int>(state.width), static_cast<int>(state.height), std::move(state.rgb));
}

std::string encode_png(const RasterImage& image) {
  if (image.width() == 0 || image.height() == 0) throw ShapeError("cannot encode an empty image");
  std::string error;
  std::string out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, error_callback, warning_callback);
  if (!png) throw ImageError("libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw ImageError("libpng initialisation failed");
  }
  std::vector<png_const_bytep> rows(static_cast<std::size_t>(image.height()));
  for (int y = 0; y < image.height(); ++y) rows[static_cast<std::size_t>(y)] = image.row(y).data();
  const bool ok = write_png(png, info, &image, &out, &rows);
  png_destroy_write_struct(&png, &info);
  if (!ok) throw ImageError("PNG encode failed: " + error);
  return out;
}

}  // namespace xwalk
