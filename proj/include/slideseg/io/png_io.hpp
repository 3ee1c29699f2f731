#ifndef SLIDESEG_IO_PNG_IO_HPP
#define SLIDESEG_IO_PNG_IO_HPP

#include <png.h>

#include <cstdint>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "slideseg/raster.hpp"

namespace slideseg {

// Spacing is not stored in the PNG; manifests and sidecars carry it, and the
// readers take it as a parameter.

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngWriteCtx {
  png_structp png = nullptr;
  png_infop info = nullptr;

  PngWriteCtx() {
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png) info = png_create_info_struct(png);
    if (!png || !info) throw std::runtime_error("png: allocation failed");
  }
  ~PngWriteCtx() { png_destroy_write_struct(&png, &info); }
};

struct PngReadCtx {
  png_structp png = nullptr;
  png_infop info = nullptr;

  PngReadCtx() {
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png) info = png_create_info_struct(png);
    if (!png || !info) throw std::runtime_error("png: allocation failed");
  }
  ~PngReadCtx() { png_destroy_read_struct(&png, &info, nullptr); }
};

inline void write_png(const std::string& path, int width, int height, int bit_depth,
                      int color_type, const std::vector<png_bytep>& rows) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw std::runtime_error("png: cannot open for writing: " + path);
  PngWriteCtx ctx;
  if (setjmp(png_jmpbuf(ctx.png))) throw std::runtime_error("png: write error: " + path);
  png_init_io(ctx.png, f.get());
  png_set_IHDR(ctx.png, ctx.info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(ctx.png, ctx.info);
  if (bit_depth == 16) png_set_swap(ctx.png);  // little-endian buffers
  png_write_image(ctx.png, const_cast<png_bytepp>(rows.data()));
  png_write_end(ctx.png, nullptr);
}

}  // namespace detail

/// 8-bit RGB slide image.
inline void write_png_rgb(const std::string& path, const RgbImage& img) {
  if (img.channels() != 3) throw std::invalid_argument("write_png_rgb: need 3 channels");
  std::vector<png_bytep> rows(img.height());
  for (int y = 0; y < img.height(); ++y)
    rows[y] = const_cast<png_bytep>(img.row(y));
  detail::write_png(path, img.width(), img.height(), 8, PNG_COLOR_TYPE_RGB, rows);
}

/// 16-bit grey score image; score s maps to round(s * 65535).
inline void write_png_score(const std::string& path, const ScoreImage& img) {
  std::vector<std::uint16_t> buf(img.pixel_count());
  for (std::size_t i = 0; i < buf.size(); ++i) {
    const double v = std::clamp(img.data()[i], 0.0, 1.0);
    buf[i] = static_cast<std::uint16_t>(std::lround(v * 65535.0));
  }
  std::vector<png_bytep> rows(img.height());
  for (int y = 0; y < img.height(); ++y)
    rows[y] = reinterpret_cast<png_bytep>(buf.data() + static_cast<std::size_t>(y) * img.width());
  detail::write_png(path, img.width(), img.height(), 16, PNG_COLOR_TYPE_GRAY, rows);
}

/// 1-bit grey mask image.
inline void write_png_mask(const std::string& path, const MaskImage& img) {
  const int stride = (img.width() + 7) / 8;
  std::vector<std::uint8_t> packed(static_cast<std::size_t>(stride) * img.height(), 0);
  for (int y = 0; y < img.height(); ++y) {
    const std::uint8_t* src = img.row(y);
    std::uint8_t* dst = packed.data() + static_cast<std::size_t>(y) * stride;
    for (int x = 0; x < img.width(); ++x)
      if (src[x]) dst[x / 8] |= static_cast<std::uint8_t>(0x80u >> (x % 8));
  }
  std::vector<png_bytep> rows(img.height());
  for (int y = 0; y < img.height(); ++y)
    rows[y] = packed.data() + static_cast<std::size_t>(y) * stride;
  detail::write_png(path, img.width(), img.height(), 1, PNG_COLOR_TYPE_GRAY, rows);
}

inline RgbImage read_png_rgb(const std::string& path, double spacing_um) {
  detail::FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("png: cannot open: " + path);
  detail::PngReadCtx ctx;
  if (setjmp(png_jmpbuf(ctx.png))) throw std::runtime_error("png: read error: " + path);
  png_init_io(ctx.png, f.get());
  png_read_info(ctx.png, ctx.info);
  png_set_strip_16(ctx.png);
  png_set_palette_to_rgb(ctx.png);
  png_set_expand_gray_1_2_4_to_8(ctx.png);
  png_set_strip_alpha(ctx.png);
  png_set_gray_to_rgb(ctx.png);
  png_read_update_info(ctx.png, ctx.info);
  const int w = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
  const int h = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
  RgbImage img(w, h, 3, spacing_um);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y) rows[y] = img.row(y);
  png_read_image(ctx.png, rows.data());
  png_read_end(ctx.png, nullptr);
  return img;
}

inline ScoreImage read_png_score(const std::string& path, double spacing_um) {
  detail::FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("png: cannot open: " + path);
  detail::PngReadCtx ctx;
  if (setjmp(png_jmpbuf(ctx.png))) throw std::runtime_error("png: read error: " + path);
  png_init_io(ctx.png, f.get());
  png_read_info(ctx.png, ctx.info);
  if (png_get_color_type(ctx.png, ctx.info) != PNG_COLOR_TYPE_GRAY ||
      png_get_bit_depth(ctx.png, ctx.info) != 16)
    throw std::runtime_error("png: expected 16-bit grey score image: " + path);
  png_set_swap(ctx.png);
  png_read_update_info(ctx.png, ctx.info);
  const int w = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
  const int h = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
  std::vector<std::uint16_t> buf(static_cast<std::size_t>(w) * h);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y)
    rows[y] = reinterpret_cast<png_bytep>(buf.data() + static_cast<std::size_t>(y) * w);
  png_read_image(ctx.png, rows.data());
  png_read_end(ctx.png, nullptr);
  ScoreImage img(w, h, 1, spacing_um);
  for (std::size_t i = 0; i < buf.size(); ++i)
    img.data()[i] = buf[i] / 65535.0;
  return img;
}

inline MaskImage read_png_mask(const std::string& path, double spacing_um) {
  detail::FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("png: cannot open: " + path);
  detail::PngReadCtx ctx;
  if (setjmp(png_jmpbuf(ctx.png))) throw std::runtime_error("png: read error: " + path);
  png_init_io(ctx.png, f.get());
  png_read_info(ctx.png, ctx.info);
  if (png_get_color_type(ctx.png, ctx.info) != PNG_COLOR_TYPE_GRAY)
    throw std::runtime_error("png: expected grey mask image: " + path);
  png_set_strip_16(ctx.png);
  png_set_expand_gray_1_2_4_to_8(ctx.png);
  png_read_update_info(ctx.png, ctx.info);
  const int w = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
  const int h = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
  MaskImage img(w, h, 1, spacing_um);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y) rows[y] = img.row(y);
  png_read_image(ctx.png, rows.data());
  png_read_end(ctx.png, nullptr);
  for (auto& v : img.data()) v = v ? 1 : 0;
  return img;
}

}  // namespace slideseg

#endif  // SLIDESEG_IO_PNG_IO_HPP
