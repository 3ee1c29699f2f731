#ifndef SLIDESEG_POSTPROCESS_HPP
#define SLIDESEG_POSTPROCESS_HPP

#include <algorithm>
#include <stdexcept>

#include "slideseg/connected.hpp"
#include "slideseg/raster.hpp"

namespace slideseg {

struct HysteresisParams {
  double low = 0.5;
  double high = 0.9;
  Connectivity connectivity = Connectivity::four;
};

/// Dichotomise a score image: keep the connected components of
/// {score >= low} that contain at least one pixel with score >= high.
inline MaskImage hysteresis_threshold(const ScoreImage& score, const HysteresisParams& p) {
  if (p.low > p.high) throw std::invalid_argument("hysteresis_threshold: low > high");
  if (score.channels() != 1) throw std::invalid_argument("hysteresis_threshold: need 1-channel score");

  MaskImage low_mask(score.width(), score.height(), 1, score.spacing());
  for (std::size_t i = 0; i < score.data().size(); ++i)
    low_mask.data()[i] = score.data()[i] >= p.low ? 1 : 0;

  MaskImage out(score.width(), score.height(), 1, score.spacing(), 0);
  for (const Region& region : connected_components(low_mask, p.connectivity)) {
    bool seeded = false;
    for (const Run& run : region.runs) {
      const double* row = score.row(run.y);
      for (int x = run.x0; x < run.x1 && !seeded; ++x)
        seeded = row[x] >= p.high;
      if (seeded) break;
    }
    if (seeded) paint_region(out, region);
  }
  return out;
}

/// Clear every 4-connected component with area < min_area; strict inequality,
/// so components of exactly min_area pixels survive.
inline MaskImage remove_small_regions(const MaskImage& mask, std::int64_t min_area,
                                      Connectivity conn = Connectivity::four) {
  MaskImage out(mask.width(), mask.height(), 1, mask.spacing(), 0);
  for (const Region& region : connected_components(mask, conn))
    if (region.area >= min_area) paint_region(out, region);
  return out;
}

struct TissueMaskParams {
  double max_luminance = 0.92;  // fraction of full scale; brighter is background
  double min_saturation = 0.05;
  std::int64_t min_area = 1600;
};

/// Crude tissue/background separation: a pixel is tissue when it is darker
/// than near-white or carries noticeable colour saturation. Specks below
/// min_area are dropped.
inline MaskImage tissue_mask(const RgbImage& slide, const TissueMaskParams& p = {}) {
  if (slide.channels() != 3) throw std::invalid_argument("tissue_mask: RGB raster required");
  MaskImage raw(slide.width(), slide.height(), 1, slide.spacing());
  for (int y = 0; y < slide.height(); ++y) {
    const std::uint8_t* row = slide.row(y);
    std::uint8_t* out = raw.row(y);
    for (int x = 0; x < slide.width(); ++x) {
      const double r = row[3 * x + 0] / 255.0;
      const double g = row[3 * x + 1] / 255.0;
      const double b = row[3 * x + 2] / 255.0;
      const double luminance = 0.2126 * r + 0.7152 * g + 0.0722 * b;
      const double hi = std::max({r, g, b});
      const double lo = std::min({r, g, b});
      const double saturation = hi > 0.0 ? (hi - lo) / hi : 0.0;
      out[x] = (luminance < p.max_luminance || saturation > p.min_saturation) ? 1 : 0;
    }
  }
  return remove_small_regions(raw, p.min_area);
}

}  // namespace slideseg

#endif  // SLIDESEG_POSTPROCESS_HPP
