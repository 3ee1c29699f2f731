#ifndef SLIDESEG_TILE_GRID_HPP
#define SLIDESEG_TILE_GRID_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "slideseg/raster.hpp"

namespace slideseg {

/// Planned set of overlapping square tiles covering a raster.
///
/// Offsets are sorted per axis; the first is 0 and the last is
/// image_dim - tile_size whenever the image is at least one tile wide.
/// Images smaller than tile_size on an axis get a single clipped tile
/// (callers pad to tile_size before handing tiles to a backend).
struct TileGrid {
  int image_width = 0;
  int image_height = 0;
  int tile_size = 0;
  int min_overlap = 0;
  std::vector<int> offsets_x;
  std::vector<int> offsets_y;

  std::size_t tile_count() const { return offsets_x.size() * offsets_y.size(); }

  /// Tile rects in canonical row-major grid order, clipped to the image.
  std::vector<Rect> rects() const {
    std::vector<Rect> out;
    out.reserve(tile_count());
    for (int oy : offsets_y)
      for (int ox : offsets_x)
        out.push_back(Rect{ox, oy, std::min(tile_size, image_width - ox),
                           std::min(tile_size, image_height - oy)});
    return out;
  }
};

namespace detail {

inline std::vector<int> plan_axis(int dim, int tile_size, int min_overlap) {
  if (dim <= tile_size) return {0};
  // minimal n with n*tile_size - (n-1)*min_overlap >= dim
  const int stride = tile_size - min_overlap;
  const int n = 1 + (dim - tile_size + stride - 1) / stride;
  std::vector<int> offsets(n);
  const double spacing = static_cast<double>(dim - tile_size) / (n - 1);
  for (int i = 0; i < n; ++i)
    offsets[i] = static_cast<int>(std::lround(i * spacing));
  offsets.front() = 0;
  offsets.back() = dim - tile_size;
  return offsets;
}

}  // namespace detail

/// Plan a tile grid with evenly spaced offsets and at least min_overlap
/// pixels of overlap between consecutive tiles on each axis.
inline TileGrid plan_tiles(int width, int height, int tile_size, int min_overlap) {
  if (width < 1 || height < 1) throw std::invalid_argument("plan_tiles: empty image");
  if (tile_size < 1) throw std::invalid_argument("plan_tiles: tile_size must be >= 1");
  if (min_overlap < 0 || min_overlap >= tile_size)
    throw std::invalid_argument("plan_tiles: need 0 <= min_overlap < tile_size");

  TileGrid g;
  g.image_width = width;
  g.image_height = height;
  g.tile_size = tile_size;
  g.min_overlap = min_overlap;
  g.offsets_x = detail::plan_axis(width, tile_size, min_overlap);
  g.offsets_y = detail::plan_axis(height, tile_size, min_overlap);

  for (const auto* offs : {&g.offsets_x, &g.offsets_y})
    for (std::size_t i = 1; i < offs->size(); ++i)
      if ((*offs)[i] - (*offs)[i - 1] > tile_size - min_overlap)
        throw std::logic_error("plan_tiles: overlap constraint violated");
  return g;
}

namespace detail {

// Linear merge weight along one axis for the tile at offsets[idx].
// Rises from 1/(overlap+1) at the outermost shared pixel to 1 at the first
// interior pixel, so no pixel ever gets weight zero.
inline std::vector<double> axis_weights(const std::vector<int>& offsets, std::size_t idx,
                                        int tile_extent, int tile_size) {
  std::vector<double> w(static_cast<std::size_t>(tile_extent), 1.0);
  const int x0 = offsets[idx];
  if (idx > 0) {
    const int left_overlap = offsets[idx - 1] + tile_size - x0;
    for (int i = 0; i < std::min(left_overlap, tile_extent); ++i)
      w[i] = static_cast<double>(i + 1) / (left_overlap + 1);
  }
  if (idx + 1 < offsets.size()) {
    const int right_overlap = x0 + tile_size - offsets[idx + 1];
    for (int i = 0; i < std::min(right_overlap, tile_extent); ++i) {
      const int p = tile_extent - 1 - i;
      if (p >= 0) w[p] = std::min(w[p], static_cast<double>(i + 1) / (right_overlap + 1));
    }
  }
  return w;
}

}  // namespace detail

/// Merge per-tile score rasters into one score image. In overlap zones each
/// tile contributes with a per-axis linear ramp; contributions are
/// normalised so weights sum to one at every pixel. Tiles may be supplied
/// in any order; accumulation happens in canonical grid order, so the
/// result is bit-identical regardless of input ordering.
inline ScoreImage merge_tiles(const std::vector<std::pair<Rect, ScoreImage>>& tiles,
                              const TileGrid& grid, double spacing = 1.0) {
  const std::vector<Rect> expect = grid.rects();

  // canonical order: grid rect index -> supplied tile
  std::vector<const ScoreImage*> ordered(expect.size(), nullptr);
  for (const auto& [rect, img] : tiles) {
    bool found = false;
    for (std::size_t k = 0; k < expect.size(); ++k) {
      if (expect[k] == rect) {
        if (img.width() != rect.width || img.height() != rect.height || img.channels() != 1)
          throw std::invalid_argument("merge_tiles: tile dims mismatch at (" +
                                      std::to_string(rect.x0) + "," + std::to_string(rect.y0) + ")");
        ordered[k] = &img;
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("merge_tiles: tile rect not in grid");
  }
  for (std::size_t k = 0; k < expect.size(); ++k)
    if (!ordered[k])
      throw std::invalid_argument("merge_tiles: missing tile for rect (" +
                                  std::to_string(expect[k].x0) + "," +
                                  std::to_string(expect[k].y0) + ")");

  Image<double> num(grid.image_width, grid.image_height, 1, spacing, 0.0);
  Image<double> den(grid.image_width, grid.image_height, 1, spacing, 0.0);

  for (std::size_t iy = 0; iy < grid.offsets_y.size(); ++iy) {
    for (std::size_t ix = 0; ix < grid.offsets_x.size(); ++ix) {
      const std::size_t k = iy * grid.offsets_x.size() + ix;
      const Rect& r = expect[k];
      const ScoreImage& tile = *ordered[k];
      const std::vector<double> wx =
          detail::axis_weights(grid.offsets_x, ix, r.width, grid.tile_size);
      const std::vector<double> wy =
          detail::axis_weights(grid.offsets_y, iy, r.height, grid.tile_size);
      for (int y = 0; y < r.height; ++y) {
        const double* src = tile.row(y);
        double* nrow = num.row(r.y0 + y) + r.x0;
        double* drow = den.row(r.y0 + y) + r.x0;
        for (int x = 0; x < r.width; ++x) {
          const double w = wx[x] * wy[y];
          nrow[x] += w * src[x];
          drow[x] += w;
        }
      }
    }
  }

  ScoreImage out(grid.image_width, grid.image_height, 1, spacing);
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    const double v = num.data()[i] / den.data()[i];
    out.data()[i] = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

/// Extract the grid's tiles from a score image (inverse of merge_tiles for
/// testing round trips).
inline std::vector<std::pair<Rect, ScoreImage>> split_tiles(const ScoreImage& img,
                                                            const TileGrid& grid) {
  std::vector<std::pair<Rect, ScoreImage>> out;
  for (const Rect& r : grid.rects()) out.emplace_back(r, crop(img, r));
  return out;
}

}  // namespace slideseg

#endif  // SLIDESEG_TILE_GRID_HPP
