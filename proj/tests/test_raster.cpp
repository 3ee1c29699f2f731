#include <catch2/catch_amalgamated.hpp>

#include "slideseg/raster.hpp"
#include "slideseg/rng.hpp"

using namespace slideseg;

namespace {

ScoreImage random_score(Rng& rng, int w, int h, double spacing = 1.0) {
  ScoreImage img(w, h, 1, spacing);
  for (auto& v : img.data()) v = rng.next_double();
  return img;
}

double mean_value(const ScoreImage& img) {
  double sum = 0.0;
  for (double v : img.data()) sum += v;
  return sum / static_cast<double>(img.data().size());
}

}  // namespace

TEST_CASE("image invariants enforced at construction") {
  CHECK_THROWS_AS(ScoreImage(0, 4, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ScoreImage(4, 0, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ScoreImage(4, 4, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ScoreImage(4, 4, 2, 1.0), std::invalid_argument);
  const ScoreImage img(5, 3, 1, 0.25);
  CHECK(img.data().size() == 15);
  CHECK(img.spacing() == 0.25);
}

TEST_CASE("downscale 2x2 score raster to 1x1 is the area average") {
  ScoreImage src(2, 2, 1, 1.0);
  src.at(0, 0) = 0.0;
  src.at(1, 0) = 1.0;
  src.at(0, 1) = 1.0;
  src.at(1, 1) = 1.0;
  const ScoreImage out = downscale(src, 2.0);
  REQUIRE(out.width() == 1);
  REQUIRE(out.height() == 1);
  CHECK(out.spacing() == 2.0);
  CHECK_THAT(out.at(0, 0), Catch::Matchers::WithinAbs(0.75, 1e-9));
}

TEST_CASE("downscale with target equal to source spacing is the identity") {
  Rng rng(7);
  const ScoreImage src = random_score(rng, 13, 9, 0.24);
  CHECK(downscale(src, 0.24) == src);
}

TEST_CASE("downscale refuses upsampling") {
  const ScoreImage src(4, 4, 1, 1.0);
  CHECK_THROWS_AS(downscale(src, 0.5), std::invalid_argument);
}

TEST_CASE("downscale dims follow floor(dim * src_spacing / target)") {
  // 0.24 um/px source at 1.0 um/px working spacing
  const ScoreImage src(1000, 500, 1, 0.24);
  const ScoreImage out = downscale(src, 1.0);
  CHECK(out.width() == 240);
  CHECK(out.height() == 120);
  CHECK(out.spacing() == 1.0);
}

TEST_CASE("downscale preserves the mean when the factor divides the dims") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int factor = 2 + static_cast<int>(rng.next_range(0, 3));
    const int w = factor * (1 + static_cast<int>(rng.next_range(0, 15)));
    const int h = factor * (1 + static_cast<int>(rng.next_range(0, 15)));
    const ScoreImage src = random_score(rng, w, h);
    const ScoreImage out = downscale(src, static_cast<double>(factor));
    CHECK_THAT(mean_value(out), Catch::Matchers::WithinAbs(mean_value(src), 1e-9));
  }
}

TEST_CASE("downscale is deterministic") {
  Rng rng(3);
  const ScoreImage src = random_score(rng, 37, 23);
  const ScoreImage a = downscale(src, 1.7);
  const ScoreImage b = downscale(src, 1.7);
  CHECK(a.data() == b.data());
}

TEST_CASE("mask downscale re-thresholds at 0.5") {
  MaskImage src(2, 2, 1, 1.0, 0);
  src.at(0, 0) = 1;
  src.at(1, 0) = 1;  // average 0.5 -> foreground
  const MaskImage out = downscale(src, 2.0);
  CHECK(out.at(0, 0) == 1);

  MaskImage sparse(2, 2, 1, 1.0, 0);
  sparse.at(0, 0) = 1;  // average 0.25 -> background
  CHECK(downscale(sparse, 2.0).at(0, 0) == 0);
}

TEST_CASE("crop of the full rect is the identity") {
  Rng rng(5);
  const ScoreImage src = random_score(rng, 8, 6);
  CHECK(crop(src, src.full_rect()) == src);
}

TEST_CASE("1x1 crop picks the source pixel") {
  Rng rng(9);
  const ScoreImage src = random_score(rng, 4, 4);
  const ScoreImage out = crop(src, Rect{0, 0, 1, 1});
  CHECK(out.at(0, 0) == src.at(0, 0));
}

TEST_CASE("crop rejects out-of-bounds rects") {
  const ScoreImage src(4, 4, 1, 1.0);
  CHECK_THROWS_AS(crop(src, Rect{2, 2, 3, 3}), std::out_of_range);
  CHECK_THROWS_AS(crop(src, Rect{-1, 0, 2, 2}), std::out_of_range);
  CHECK_THROWS_AS(crop(src, Rect{0, 0, 0, 1}), std::out_of_range);
}

TEST_CASE("crop composes: crop of crop equals single crop with summed offsets") {
  Rng rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    const int w = 10 + static_cast<int>(rng.next_range(0, 20));
    const int h = 10 + static_cast<int>(rng.next_range(0, 20));
    const ScoreImage src = random_score(rng, w, h);
    const Rect outer{static_cast<int>(rng.next_range(0, 3)), static_cast<int>(rng.next_range(0, 3)),
                     w / 2 + 2, h / 2 + 2};
    const Rect inner{1, 2, outer.width / 2, outer.height / 2};
    const ScoreImage two_step = crop(crop(src, outer), inner);
    const ScoreImage one_step =
        crop(src, Rect{outer.x0 + inner.x0, outer.y0 + inner.y0, inner.width, inner.height});
    CHECK(two_step == one_step);
  }
}

TEST_CASE("crop pixels map back to the source") {
  Rng rng(17);
  const ScoreImage src = random_score(rng, 12, 12);
  const Rect r{3, 4, 5, 6};
  const ScoreImage out = crop(src, r);
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x)
      CHECK(out.at(x, y) == src.at(r.x0 + x, r.y0 + y));
}
