#ifndef SLIDESEG_CONNECTED_HPP
#define SLIDESEG_CONNECTED_HPP

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "slideseg/raster.hpp"

namespace slideseg {

enum class Connectivity { four, eight };

/// One horizontal run of foreground pixels: [x0, x1) on row y.
struct Run {
  int y;
  int x0;
  int x1;
};

/// A maximal connected foreground component, pixels stored as row runs.
struct Region {
  int id = 0;
  std::int64_t area = 0;
  Rect bbox{};
  std::vector<Run> runs;  // sorted by (y, x0)
};

namespace detail {

struct UnionFind {
  std::vector<int> parent;

  int make() {
    parent.push_back(static_cast<int>(parent.size()));
    return parent.back();
  }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a < b) parent[b] = a;
    else if (b < a) parent[a] = b;
  }
};

}  // namespace detail

/// Run-based two-pass labeling. Extracts foreground runs per row, unions
/// runs that touch between adjacent rows, then groups runs into regions.
/// Region ids follow scanline order of each region's first pixel.
inline std::vector<Region> connected_components(const MaskImage& mask,
                                                Connectivity conn = Connectivity::four) {
  if (mask.channels() != 1) throw std::invalid_argument("connected_components: mask must be 1-channel");
  const int w = mask.width();
  const int h = mask.height();

  std::vector<Run> runs;
  std::vector<std::size_t> row_begin(static_cast<std::size_t>(h) + 1, 0);
  for (int y = 0; y < h; ++y) {
    row_begin[y] = runs.size();
    const std::uint8_t* row = mask.row(y);
    int x = 0;
    while (x < w) {
      if (row[x]) {
        int x1 = x + 1;
        while (x1 < w && row[x1]) ++x1;
        runs.push_back(Run{y, x, x1});
        x = x1;
      } else {
        ++x;
      }
    }
  }
  row_begin[h] = runs.size();

  detail::UnionFind uf;
  for (std::size_t i = 0; i < runs.size(); ++i) uf.make();

  // Adjacent rows: runs [a0,a1) and [b0,b1) touch if they share a column
  // (4-connectivity) or are diagonal neighbours (8-connectivity).
  const int slack = conn == Connectivity::eight ? 1 : 0;
  for (int y = 1; y < h; ++y) {
    std::size_t a = row_begin[y - 1];
    std::size_t b = row_begin[y];
    const std::size_t a_end = row_begin[y];
    const std::size_t b_end = row_begin[y + 1];
    while (a < a_end && b < b_end) {
      const Run& ra = runs[a];
      const Run& rb = runs[b];
      if (ra.x0 < rb.x1 + slack && rb.x0 < ra.x1 + slack)
        uf.unite(static_cast<int>(a), static_cast<int>(b));
      if (ra.x1 <= rb.x1) ++a;
      else ++b;
    }
  }

  // Map union-find roots to dense region ids in first-run order. Runs are
  // already in scanline order, so the first run of each root is its
  // region's first pixel.
  std::vector<int> root_to_id(runs.size(), -1);
  std::vector<Region> regions;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const int root = uf.find(static_cast<int>(i));
    if (root_to_id[root] < 0) {
      root_to_id[root] = static_cast<int>(regions.size());
      Region r;
      r.id = root_to_id[root];
      regions.push_back(std::move(r));
    }
    Region& reg = regions[root_to_id[root]];
    const Run& run = runs[i];
    reg.runs.push_back(run);
    reg.area += run.x1 - run.x0;
    if (reg.runs.size() == 1) {
      reg.bbox = Rect{run.x0, run.y, run.x1 - run.x0, 1};
    } else {
      const int bx1 = std::max(reg.bbox.x0 + reg.bbox.width, run.x1);
      const int by1 = std::max(reg.bbox.y0 + reg.bbox.height, run.y + 1);
      reg.bbox.x0 = std::min(reg.bbox.x0, run.x0);
      reg.bbox.y0 = std::min(reg.bbox.y0, run.y);
      reg.bbox.width = bx1 - reg.bbox.x0;
      reg.bbox.height = by1 - reg.bbox.y0;
    }
  }
  return regions;
}

/// Paint a region's pixels into a mask.
inline void paint_region(MaskImage& mask, const Region& region, std::uint8_t value = 1) {
  for (const Run& run : region.runs)
    for (int x = run.x0; x < run.x1; ++x) mask.at(x, run.y) = value;
}

/// Pixel-count intersection of two RLE regions.
inline std::int64_t region_intersection(const Region& a, const Region& b) {
  std::int64_t total = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.runs.size() && j < b.runs.size()) {
    const Run& ra = a.runs[i];
    const Run& rb = b.runs[j];
    if (ra.y < rb.y) { ++i; continue; }
    if (rb.y < ra.y) { ++j; continue; }
    const int lo = std::max(ra.x0, rb.x0);
    const int hi = std::min(ra.x1, rb.x1);
    if (hi > lo) total += hi - lo;
    if (ra.x1 <= rb.x1) ++i;
    else ++j;
  }
  return total;
}

/// Intersection over union of two regions.
inline double region_iou(const Region& a, const Region& b) {
  const std::int64_t inter = region_intersection(a, b);
  if (inter == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(a.area + b.area - inter);
}

}  // namespace slideseg

#endif  // SLIDESEG_CONNECTED_HPP
