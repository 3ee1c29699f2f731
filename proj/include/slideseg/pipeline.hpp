#ifndef SLIDESEG_PIPELINE_HPP
#define SLIDESEG_PIPELINE_HPP

#include <atomic>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "slideseg/backend.hpp"
#include "slideseg/postprocess.hpp"
#include "slideseg/raster.hpp"
#include "slideseg/tile_grid.hpp"

namespace slideseg {

struct PipelineConfig {
  double working_spacing = 1.0;  // um per pixel
  int tile_size = 7680;
  int min_overlap = 1024;  // Fig. 3 default; set 0 for overlap-free inference
  HysteresisParams hysteresis{};
  std::int64_t min_region_area = 1600;
  bool apply_tissue_mask = false;
  TissueMaskParams tissue{};
  int workers = 1;

  void validate() const {
    if (!(working_spacing > 0.0)) throw std::invalid_argument("config: working spacing must be > 0");
    if (tile_size < 1) throw std::invalid_argument("config: tile_size must be >= 1");
    if (min_overlap < 0 || min_overlap >= tile_size)
      throw std::invalid_argument("config: need 0 <= min_overlap < tile_size");
    if (hysteresis.low < 0.0 || hysteresis.high > 1.0 || hysteresis.low > hysteresis.high)
      throw std::invalid_argument("config: need 0 <= low <= high <= 1");
    if (min_region_area < 0) throw std::invalid_argument("config: min_region_area must be >= 0");
    if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  }

  static PipelineConfig from_json(const nlohmann::json& j) {
    PipelineConfig c;
    c.working_spacing = j.value("working_spacing", c.working_spacing);
    c.tile_size = j.value("tile_size", c.tile_size);
    c.min_overlap = j.value("min_overlap", c.min_overlap);
    c.hysteresis.low = j.value("hysteresis_low", c.hysteresis.low);
    c.hysteresis.high = j.value("hysteresis_high", c.hysteresis.high);
    if (j.value("hysteresis_connectivity", 4) == 8)
      c.hysteresis.connectivity = Connectivity::eight;
    c.min_region_area = j.value("min_region_area", c.min_region_area);
    c.apply_tissue_mask = j.value("apply_tissue_mask", c.apply_tissue_mask);
    c.validate();
    return c;
  }

  nlohmann::json to_json() const {
    return nlohmann::json{
        {"working_spacing", working_spacing},
        {"tile_size", tile_size},
        {"min_overlap", min_overlap},
        {"hysteresis_low", hysteresis.low},
        {"hysteresis_high", hysteresis.high},
        {"hysteresis_connectivity", hysteresis.connectivity == Connectivity::four ? 4 : 8},
        {"min_region_area", min_region_area},
        {"apply_tissue_mask", apply_tissue_mask}};
  }
};

struct PipelineResult {
  ScoreImage score;                       // merged score image at working spacing
  MaskImage mask;                         // final segmentation
  std::optional<MaskImage> reference;     // reference resampled to working spacing
  bool no_prediction = false;             // final mask is empty
};

namespace detail {

/// White-padded tile extraction; images smaller than tile_size are padded so
/// backends always see a fixed input size.
inline RgbImage extract_padded_tile(const RgbImage& img, const Rect& r, int tile_size) {
  RgbImage tile(tile_size, tile_size, 3, img.spacing(), 255);
  for (int y = 0; y < r.height; ++y) {
    const std::uint8_t* src = img.row(r.y0 + y) + static_cast<std::size_t>(r.x0) * 3;
    std::copy(src, src + static_cast<std::size_t>(r.width) * 3, tile.row(y));
  }
  return tile;
}

template <typename Fn>
inline void parallel_for(std::size_t count, int workers, Fn&& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = static_cast<int>(std::min<std::size_t>(workers, count));
  pool.reserve(n);
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

/// End-to-end segmentation of one slide: downscale to working spacing, plan
/// tiles, score each tile with the backend, merge with linear distance
/// weights, dichotomise by hysteresis and drop small regions. The reference
/// mask, when given, is resampled with the same downscale operator so
/// evaluation stays spacing-consistent.
inline PipelineResult run_pipeline(const RgbImage& slide, const MaskImage* reference,
                                   const BackendDescriptor& backend, const PipelineConfig& config) {
  config.validate();
  if (slide.width() < 1 || slide.height() < 1) throw std::invalid_argument("run_pipeline: empty slide");
  if (slide.spacing() > config.working_spacing)
    throw std::invalid_argument("run_pipeline: slide spacing coarser than working spacing");

  const RgbImage working = downscale(slide, config.working_spacing);
  std::optional<MaskImage> ref_working;
  if (reference) ref_working = downscale(*reference, config.working_spacing);

  std::unique_ptr<TileScorer> scorer =
      make_scorer(backend, ref_working ? &*ref_working : nullptr, config.working_spacing);

  const TileGrid grid =
      plan_tiles(working.width(), working.height(), config.tile_size, config.min_overlap);
  const std::vector<Rect> rects = grid.rects();

  std::vector<std::pair<Rect, ScoreImage>> scored(rects.size());
  detail::parallel_for(rects.size(), config.workers, [&](std::size_t i) {
    const Rect& r = rects[i];
    const RgbImage tile = detail::extract_padded_tile(working, r, config.tile_size);
    ScoreImage full = scorer->score(i, r, tile);
    scored[i] = {r, crop(full, Rect{0, 0, r.width, r.height})};
  });

  PipelineResult out{
      merge_tiles(scored, grid, config.working_spacing),
      MaskImage(working.width(), working.height(), 1, config.working_spacing),
      std::move(ref_working),
      false};
  MaskImage mask = hysteresis_threshold(out.score, config.hysteresis);
  if (config.apply_tissue_mask) {
    const MaskImage tissue = tissue_mask(working, config.tissue);
    for (std::size_t i = 0; i < mask.data().size(); ++i)
      if (!tissue.data()[i]) mask.data()[i] = 0;
  }
  mask = remove_small_regions(mask, config.min_region_area);
  out.mask = std::move(mask);
  out.no_prediction = true;
  for (std::uint8_t v : out.mask.data())
    if (v) {
      out.no_prediction = false;
      break;
    }
  return out;
}

}  // namespace slideseg

#endif  // SLIDESEG_PIPELINE_HPP
