#include <queue>

#include <catch2/catch_amalgamated.hpp>

#include "slideseg/postprocess.hpp"
#include "slideseg/rng.hpp"
#include "slideseg/synth.hpp"

using namespace slideseg;

namespace {

// flood-fill hysteresis oracle: BFS from every high-scoring seed through the
// low-scoring mask
MaskImage oracle_hysteresis(const ScoreImage& s, const HysteresisParams& p) {
  const int w = s.width();
  const int h = s.height();
  MaskImage out(w, h, 1, s.spacing(), 0);
  std::queue<std::pair<int, int>> q;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (s.at(x, y) >= p.high && !out.at(x, y)) {
        out.at(x, y) = 1;
        q.emplace(x, y);
      }
  while (!q.empty()) {
    const auto [x, y] = q.front();
    q.pop();
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        if (p.connectivity == Connectivity::four && dx != 0 && dy != 0) continue;
        const int nx = x + dx;
        const int ny = y + dy;
        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
        if (out.at(nx, ny) || s.at(nx, ny) < p.low) continue;
        out.at(nx, ny) = 1;
        q.emplace(nx, ny);
      }
  }
  return out;
}

ScoreImage random_score(Rng& rng, int w, int h) {
  ScoreImage img(w, h, 1, 1.0);
  for (auto& v : img.data()) v = rng.next_double();
  return img;
}

}  // namespace

TEST_CASE("hysteresis on a single bridged row") {
  ScoreImage s(5, 1, 1, 1.0);
  const double vals[5] = {0.4, 0.6, 0.95, 0.6, 0.4};
  for (int x = 0; x < 5; ++x) s.at(x, 0) = vals[x];
  const MaskImage m = hysteresis_threshold(s, HysteresisParams{0.5, 0.9, Connectivity::four});
  const std::vector<std::uint8_t> expect = {0, 1, 1, 1, 0};
  CHECK(m.data() == expect);
}

TEST_CASE("component above low without a high seed is dropped") {
  ScoreImage s(7, 1, 1, 1.0);
  const double vals[7] = {0.6, 0.6, 0.0, 0.95, 0.6, 0.0, 0.7};
  for (int x = 0; x < 7; ++x) s.at(x, 0) = vals[x];
  const MaskImage m = hysteresis_threshold(s, HysteresisParams{0.5, 0.9, Connectivity::four});
  const std::vector<std::uint8_t> expect = {0, 0, 0, 1, 1, 0, 0};
  CHECK(m.data() == expect);
}

TEST_CASE("hysteresis rejects low > high") {
  const ScoreImage s(3, 3, 1, 1.0, 0.5);
  CHECK_THROWS_AS(hysteresis_threshold(s, HysteresisParams{0.9, 0.5, Connectivity::four}),
                  std::invalid_argument);
}

TEST_CASE("low == high degenerates to a plain threshold") {
  Rng rng(211);
  const ScoreImage s = random_score(rng, 20, 20);
  const MaskImage m = hysteresis_threshold(s, HysteresisParams{0.5, 0.5, Connectivity::four});
  for (std::size_t i = 0; i < s.data().size(); ++i)
    CHECK(m.data()[i] == (s.data()[i] >= 0.5 ? 1 : 0));
}

TEST_CASE("hysteresis matches the flood-fill oracle on random scores") {
  Rng rng(223);
  for (int trial = 0; trial < 80; ++trial) {
    const int w = 1 + static_cast<int>(rng.next_range(0, 30));
    const int h = 1 + static_cast<int>(rng.next_range(0, 30));
    const ScoreImage s = random_score(rng, w, h);
    const double low = rng.uniform(0.2, 0.6);
    const double high = rng.uniform(low, 0.95);
    for (Connectivity conn : {Connectivity::four, Connectivity::eight}) {
      const HysteresisParams p{low, high, conn};
      const MaskImage got = hysteresis_threshold(s, p);
      CHECK(got.data() == oracle_hysteresis(s, p).data());
      // sandwich: {>= high} subset of result subset of {>= low}
      for (std::size_t i = 0; i < s.data().size(); ++i) {
        if (s.data()[i] >= high) CHECK(got.data()[i] == 1);
        if (got.data()[i]) CHECK(s.data()[i] >= low);
      }
    }
  }
}

TEST_CASE("lowering either threshold never shrinks the mask") {
  Rng rng(227);
  for (int trial = 0; trial < 30; ++trial) {
    const ScoreImage s = random_score(rng, 24, 24);
    const double low = rng.uniform(0.3, 0.5);
    const double high = rng.uniform(0.6, 0.9);
    const MaskImage base = hysteresis_threshold(s, HysteresisParams{low, high, Connectivity::four});
    const MaskImage lower_low =
        hysteresis_threshold(s, HysteresisParams{low - 0.1, high, Connectivity::four});
    const MaskImage lower_high =
        hysteresis_threshold(s, HysteresisParams{low, high - 0.1, Connectivity::four});
    for (std::size_t i = 0; i < base.data().size(); ++i) {
      if (base.data()[i]) {
        CHECK(lower_low.data()[i] == 1);
        CHECK(lower_high.data()[i] == 1);
      }
    }
  }
}

TEST_CASE("remove_small_regions is strict below the cutoff") {
  // a 40x40 block (1600 px) and a 1599 px blob
  MaskImage m(120, 60, 1, 1.0, 0);
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 40; ++x) m.at(x, y) = 1;
  int placed = 0;
  for (int y = 0; y < 40 && placed < 1599; ++y)
    for (int x = 60; x < 100 && placed < 1599; ++x, ++placed) m.at(x, y) = 1;

  const MaskImage cleaned = remove_small_regions(m, 1600);
  std::int64_t kept = 0;
  for (auto v : cleaned.data()) kept += v;
  CHECK(kept == 1600);
  CHECK(cleaned.at(0, 0) == 1);
  CHECK(cleaned.at(60, 0) == 0);
}

TEST_CASE("remove_small_regions is idempotent and anti-monotone in min_area") {
  Rng rng(229);
  MaskImage m(80, 80, 1, 1.0);
  for (auto& v : m.data()) v = rng.next_double() < 0.55 ? 1 : 0;
  const MaskImage once = remove_small_regions(m, 20);
  const MaskImage twice = remove_small_regions(once, 20);
  CHECK(once.data() == twice.data());

  const MaskImage stricter = remove_small_regions(m, 60);
  for (std::size_t i = 0; i < m.data().size(); ++i)
    if (stricter.data()[i]) CHECK(once.data()[i] == 1);
}

TEST_CASE("remove_small_regions with min_area 0 keeps everything") {
  Rng rng(233);
  MaskImage m(30, 30, 1, 1.0);
  for (auto& v : m.data()) v = rng.next_double() < 0.5 ? 1 : 0;
  CHECK(remove_small_regions(m, 0).data() == m.data());
}

TEST_CASE("tissue_mask covers a synthetic slide's tissue") {
  SynthSpec spec;
  spec.seed = 9;
  spec.width = 1000;
  spec.height = 1000;
  const SynthSlide slide = synth_slide(spec);
  const MaskImage tissue = tissue_mask(slide.slide);

  // every tumour pixel lies in tissue, and tissue covers >= 99% of the
  // non-background (non-near-white) pixels
  std::int64_t stained = 0;
  std::int64_t stained_in_mask = 0;
  for (int y = 0; y < slide.slide.height(); ++y) {
    const std::uint8_t* row = slide.slide.row(y);
    for (int x = 0; x < slide.slide.width(); ++x) {
      const bool near_white = row[3 * x] > 240 && row[3 * x + 1] > 240 && row[3 * x + 2] > 240;
      if (!near_white) {
        ++stained;
        if (tissue.at(x, y)) ++stained_in_mask;
      }
      if (slide.mask.at(x, y)) CHECK(tissue.at(x, y) == 1);
    }
  }
  REQUIRE(stained > 0);
  CHECK(static_cast<double>(stained_in_mask) / stained >= 0.99);
}
