#ifndef SLIDESEG_RASTER_HPP
#define SLIDESEG_RASTER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace slideseg {

/// Axis-aligned pixel rectangle, origin at (x0, y0).
struct Rect {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Rectangular pixel grid with physical spacing in micrometres per pixel.
/// Row-major storage, channels interleaved. Used with T = float for score
/// images (values in [0,1]), T = uint8_t for binary masks ({0,1}) and RGB.
template <typename T, typename Tag = void>
class Image {
 public:
  Image() = default;

  Image(int width, int height, int channels, double spacing_um, T fill = T{})
      : width_(width), height_(height), channels_(channels), spacing_(spacing_um),
        data_(static_cast<std::size_t>(width) * height * channels, fill) {
    if (width < 1 || height < 1) throw std::invalid_argument("Image: dims must be >= 1");
    if (channels != 1 && channels != 3) throw std::invalid_argument("Image: channels must be 1 or 3");
    if (!(spacing_um > 0.0)) throw std::invalid_argument("Image: spacing must be positive");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  double spacing() const { return spacing_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

  T& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  const T& at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  T* row(int y) { return data_.data() + static_cast<std::size_t>(y) * width_ * channels_; }
  const T* row(int y) const { return data_.data() + static_cast<std::size_t>(y) * width_ * channels_; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  Rect full_rect() const { return Rect{0, 0, width_, height_}; }

  bool contains(const Rect& r) const {
    return r.width >= 1 && r.height >= 1 && r.x0 >= 0 && r.y0 >= 0 &&
           r.x0 + r.width <= width_ && r.y0 + r.height <= height_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  double spacing_ = 1.0;
  std::vector<T> data_;
};

struct MaskTag {};
struct RgbTag {};
using ScoreImage = Image<double>;
using MaskImage = Image<std::uint8_t, MaskTag>;
using RgbImage = Image<std::uint8_t, RgbTag>;

/// Sub-raster copy. Spacing is preserved; the rect must lie inside src.
template <typename T, typename Tag>
Image<T, Tag> crop(const Image<T, Tag>& src, const Rect& r) {
  if (!src.contains(r)) {
    throw std::out_of_range("crop: rect (" + std::to_string(r.x0) + "," + std::to_string(r.y0) +
                            " " + std::to_string(r.width) + "x" + std::to_string(r.height) +
                            ") outside raster " + std::to_string(src.width()) + "x" +
                            std::to_string(src.height()));
  }
  Image<T, Tag> out(r.width, r.height, src.channels(), src.spacing());
  const std::size_t row_bytes = static_cast<std::size_t>(r.width) * src.channels();
  for (int y = 0; y < r.height; ++y) {
    const T* s = src.row(r.y0 + y) + static_cast<std::size_t>(r.x0) * src.channels();
    std::copy(s, s + row_bytes, out.row(y));
  }
  return out;
}

namespace detail {

// Per-axis fractional coverage of source pixels by one output pixel.
// scale = target_spacing / src_spacing >= 1, so each output pixel covers
// [o*scale, (o+1)*scale) in source coordinates.
struct AxisSpan {
  int first;
  int count;
  double w_first;
  double w_last;
};

inline AxisSpan axis_span(int o, double scale, int src_dim) {
  const double lo = o * scale;
  const double hi = std::min((o + 1) * scale, static_cast<double>(src_dim));
  int first = static_cast<int>(std::floor(lo));
  int last = static_cast<int>(std::ceil(hi)) - 1;
  first = std::clamp(first, 0, src_dim - 1);
  last = std::clamp(last, first, src_dim - 1);
  AxisSpan s;
  s.first = first;
  s.count = last - first + 1;
  if (s.count == 1) {
    s.w_first = hi - lo;
    s.w_last = s.w_first;
  } else {
    s.w_first = first + 1 - lo;
    s.w_last = hi - last;
  }
  return s;
}

template <typename T, typename Tag>
Image<double> area_average(const Image<T, Tag>& src, double target_spacing) {
  const double scale = target_spacing / src.spacing();
  const int ow = std::max(1, static_cast<int>(std::floor(src.width() * src.spacing() / target_spacing)));
  const int oh = std::max(1, static_cast<int>(std::floor(src.height() * src.spacing() / target_spacing)));
  Image<double> out(ow, oh, src.channels(), target_spacing);
  const int nc = src.channels();
  std::vector<double> acc(nc);
  for (int oy = 0; oy < oh; ++oy) {
    const AxisSpan ys = axis_span(oy, scale, src.height());
    for (int ox = 0; ox < ow; ++ox) {
      const AxisSpan xs = axis_span(ox, scale, src.width());
      std::fill(acc.begin(), acc.end(), 0.0);
      double wsum = 0.0;
      for (int j = 0; j < ys.count; ++j) {
        double wy = 1.0;
        if (j == 0) wy = ys.w_first;
        if (j == ys.count - 1) wy = (ys.count == 1) ? ys.w_first : ys.w_last;
        const T* srow = src.row(ys.first + j);
        for (int i = 0; i < xs.count; ++i) {
          double wx = 1.0;
          if (i == 0) wx = xs.w_first;
          if (i == xs.count - 1) wx = (xs.count == 1) ? xs.w_first : xs.w_last;
          const double w = wx * wy;
          const T* px = srow + static_cast<std::size_t>(xs.first + i) * nc;
          for (int c = 0; c < nc; ++c) acc[c] += w * px[c];
          wsum += w;
        }
      }
      for (int c = 0; c < nc; ++c) out.at(ox, oy, c) = acc[c] / wsum;
    }
  }
  return out;
}

inline void require_downscale(double src_spacing, double target_spacing) {
  if (target_spacing < src_spacing) {
    throw std::invalid_argument("downscale: target spacing " + std::to_string(target_spacing) +
                                " finer than source " + std::to_string(src_spacing) +
                                " (no upsampling)");
  }
}

}  // namespace detail

/// Box-filter downscale of a score image to a coarser spacing. Each output
/// pixel is the exact area-weighted mean of the covered source pixels.
inline ScoreImage downscale(const ScoreImage& src, double target_spacing) {
  detail::require_downscale(src.spacing(), target_spacing);
  if (target_spacing == src.spacing()) return src;
  Image<double> avg = detail::area_average(src, target_spacing);
  ScoreImage out(avg.width(), avg.height(), 1, target_spacing);
  for (std::size_t i = 0; i < avg.data().size(); ++i)
    out.data()[i] = std::clamp(avg.data()[i], 0.0, 1.0);
  return out;
}

/// RGB downscale with the same area-average kernel, rounded back to 8 bit.
inline RgbImage downscale(const RgbImage& src, double target_spacing) {
  detail::require_downscale(src.spacing(), target_spacing);
  if (target_spacing == src.spacing()) return src;
  Image<double> avg = detail::area_average(src, target_spacing);
  RgbImage out(avg.width(), avg.height(), src.channels(), target_spacing);
  for (std::size_t i = 0; i < avg.data().size(); ++i)
    out.data()[i] = static_cast<std::uint8_t>(std::lround(std::clamp(avg.data()[i], 0.0, 255.0)));
  return out;
}

/// Mask downscale: area-average in score space, re-threshold at 0.5.
inline MaskImage downscale(const MaskImage& src, double target_spacing) {
  detail::require_downscale(src.spacing(), target_spacing);
  if (target_spacing == src.spacing()) return src;
  Image<double> avg = detail::area_average(src, target_spacing);
  MaskImage out(avg.width(), avg.height(), 1, target_spacing);
  for (std::size_t i = 0; i < avg.data().size(); ++i)
    out.data()[i] = avg.data()[i] >= 0.5 ? 1 : 0;
  return out;
}

}  // namespace slideseg

#endif  // SLIDESEG_RASTER_HPP
