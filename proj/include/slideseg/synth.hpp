#ifndef SLIDESEG_SYNTH_HPP
#define SLIDESEG_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "slideseg/raster.hpp"
#include "slideseg/rng.hpp"

namespace slideseg {

/// Stain palette: near-white background, pink benign tissue, purple tumour.
struct StainPalette {
  std::uint8_t background[3] = {248, 246, 248};
  std::uint8_t tissue[3] = {238, 180, 195};
  std::uint8_t tumour[3] = {190, 140, 200};
  std::uint8_t nucleus[3] = {90, 50, 120};
};

/// Parameters for one synthetic slide. Generation is reproducible: the same
/// spec yields bit-identical slide and mask.
struct SynthSpec {
  std::uint64_t seed = 1;
  int width = 2000;
  int height = 2000;
  double spacing_um = 1.0;
  int min_blobs = 2;
  int max_blobs = 5;
  double min_radius_um = 120.0;
  double max_radius_um = 400.0;
  bool fragmentation = false;  // many small fragments, mimicking TUR material
  StainPalette palette{};

  void validate() const {
    if (width < 1 || height < 1) throw std::invalid_argument("synth: dims must be >= 1");
    if (!(spacing_um > 0.0)) throw std::invalid_argument("synth: spacing must be positive");
    if (min_blobs < 0 || max_blobs < min_blobs) throw std::invalid_argument("synth: bad blob count range");
    if (!(min_radius_um > 0.0) || max_radius_um < min_radius_um)
      throw std::invalid_argument("synth: bad radius range");
  }

  /// Expected tumour foreground fraction, ignoring blob overlap.
  double expected_foreground_fraction() const {
    const double mean_count = 0.5 * (min_blobs + max_blobs);
    const double a = min_radius_um / spacing_um;
    const double b = max_radius_um / spacing_um;
    const double mean_r2 = (b * b * b - a * a * a) / (3.0 * (b - a) + 1e-300);
    return mean_count * M_PI * mean_r2 / (static_cast<double>(width) * height);
  }
};

struct SynthSlide {
  RgbImage slide;
  MaskImage mask;
};

namespace detail {

inline void fill_disc(MaskImage& mask, double cx, double cy, double r) {
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - r)));
  const int x1 = std::min(mask.width() - 1, static_cast<int>(std::ceil(cx + r)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - r)));
  const int y1 = std::min(mask.height() - 1, static_cast<int>(std::ceil(cy + r)));
  const double r2 = r * r;
  for (int y = y0; y <= y1; ++y) {
    const double dy = y + 0.5 - cy;
    std::uint8_t* row = mask.row(y);
    for (int x = x0; x <= x1; ++x) {
      const double dx = x + 0.5 - cx;
      if (dx * dx + dy * dy <= r2) row[x] = 1;
    }
  }
}

}  // namespace detail

/// Generate one synthetic H&E-like slide with its exact tumour mask.
/// Tumour areas get a denser nuclear-dot texture than benign tissue so
/// image-driven backends have signal to work with.
inline SynthSlide synth_slide(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  MaskImage tumour(spec.width, spec.height, 1, spec.spacing_um, 0);
  MaskImage tissue(spec.width, spec.height, 1, spec.spacing_um, 0);

  // benign tissue: one big ellipse roughly centred on the slide
  {
    const double cx = spec.width * rng.uniform(0.45, 0.55);
    const double cy = spec.height * rng.uniform(0.45, 0.55);
    const double rx = spec.width * rng.uniform(0.38, 0.46);
    const double ry = spec.height * rng.uniform(0.38, 0.46);
    for (int y = 0; y < spec.height; ++y) {
      const double dy = (y + 0.5 - cy) / ry;
      std::uint8_t* row = tissue.row(y);
      for (int x = 0; x < spec.width; ++x) {
        const double dx = (x + 0.5 - cx) / rx;
        if (dx * dx + dy * dy <= 1.0) row[x] = 1;
      }
    }
  }

  const int blob_count =
      static_cast<int>(rng.next_range(static_cast<std::uint64_t>(spec.min_blobs),
                                      static_cast<std::uint64_t>(spec.max_blobs)));
  for (int b = 0; b < blob_count; ++b) {
    double r_px = rng.uniform(spec.min_radius_um, spec.max_radius_um) / spec.spacing_um;
    if (spec.fragmentation) r_px /= 5.0;
    if (2.0 * r_px >= std::min(spec.width, spec.height))
      throw std::invalid_argument("synth: blob radius does not fit the slide");
    const double cx = rng.uniform(r_px, spec.width - r_px);
    const double cy = rng.uniform(r_px, spec.height - r_px);
    if (spec.fragmentation) {
      // a loose cluster of small fragments around the planned centre
      const int fragments = static_cast<int>(rng.next_range(10, 20));
      for (int k = 0; k < fragments; ++k) {
        const double fr = r_px * rng.uniform(0.2, 0.5);
        const double fx =
            std::clamp(cx + rng.normal(0.0, 3.0 * r_px), fr, spec.width - fr);
        const double fy =
            std::clamp(cy + rng.normal(0.0, 3.0 * r_px), fr, spec.height - fr);
        detail::fill_disc(tumour, fx, fy, fr);
      }
    } else {
      detail::fill_disc(tumour, cx, cy, r_px);
    }
  }

  // paint: background, tissue, tumour, then nuclear dots
  RgbImage slide(spec.width, spec.height, 3, spec.spacing_um);
  for (int y = 0; y < spec.height; ++y) {
    std::uint8_t* row = slide.row(y);
    const std::uint8_t* tis = tissue.row(y);
    const std::uint8_t* tum = tumour.row(y);
    for (int x = 0; x < spec.width; ++x) {
      const std::uint8_t* colour = tum[x] ? spec.palette.tumour
                                  : tis[x] ? spec.palette.tissue
                                           : spec.palette.background;
      row[3 * x + 0] = colour[0];
      row[3 * x + 1] = colour[1];
      row[3 * x + 2] = colour[2];
    }
  }
  const std::size_t n_px = slide.pixel_count();
  const std::size_t benign_dots = n_px / 400;
  const std::size_t tumour_dots = n_px / 100;
  auto scatter_dots = [&](const MaskImage& where, bool inside, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      const int x = static_cast<int>(rng.next_range(0, spec.width - 1));
      const int y = static_cast<int>(rng.next_range(0, spec.height - 1));
      if ((where.at(x, y) != 0) != inside) continue;
      std::uint8_t* px = slide.row(y) + 3 * x;
      px[0] = spec.palette.nucleus[0];
      px[1] = spec.palette.nucleus[1];
      px[2] = spec.palette.nucleus[2];
    }
  };
  scatter_dots(tumour, false, benign_dots);
  scatter_dots(tumour, true, tumour_dots);

  return SynthSlide{std::move(slide), std::move(tumour)};
}

/// Per-slide seed derivation for cohorts: independent of slide count.
inline std::uint64_t cohort_slide_seed(std::uint64_t master_seed, std::size_t index) {
  std::uint64_t sm = master_seed ^ (0xa5a5a5a5a5a5a5a5ULL + index * 0x9e3779b97f4a7c15ULL);
  return splitmix64(sm);
}

}  // namespace slideseg

#endif  // SLIDESEG_SYNTH_HPP
