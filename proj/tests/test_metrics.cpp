#include <catch2/catch_amalgamated.hpp>

#include "slideseg/metrics.hpp"
#include "slideseg/rng.hpp"

using namespace slideseg;

namespace {

MaskImage random_mask(Rng& rng, int w, int h, double p) {
  MaskImage m(w, h, 1, 1.0);
  for (auto& v : m.data()) v = rng.next_double() < p ? 1 : 0;
  return m;
}

// naive per-pixel recount
ContingencyTable oracle_contingency(const MaskImage& pred, const MaskImage& ref,
                                    const MaskImage* domain) {
  ContingencyTable t;
  for (int y = 0; y < pred.height(); ++y)
    for (int x = 0; x < pred.width(); ++x) {
      if (domain && !domain->at(x, y)) continue;
      const bool p = pred.at(x, y);
      const bool r = ref.at(x, y);
      t.tp += p && r;
      t.fp += p && !r;
      t.fn += !p && r;
      t.tn += !p && !r;
    }
  return t;
}

}  // namespace

TEST_CASE("contingency on shifted 3x3 blocks in a 10x10 frame") {
  // reference 3x3 at the origin, prediction 3x3 shifted by (1,1)
  MaskImage ref(10, 10, 1, 1.0, 0);
  MaskImage pred(10, 10, 1, 1.0, 0);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) {
      ref.at(x, y) = 1;
      pred.at(x + 1, y + 1) = 1;
    }
  const ContingencyTable t = contingency(pred, ref);
  CHECK(t.tp == 4);
  CHECK(t.fp == 5);
  CHECK(t.fn == 5);
  CHECK(t.tn == 86);
  CHECK(t.total() == 100);
  CHECK_THAT(dsc(t), Catch::Matchers::WithinAbs(8.0 / 18.0, 1e-15));
}

TEST_CASE("frozen contingency: tp 6, fp 3, fn 3 gives DSC two thirds") {
  const ContingencyTable t{6, 3, 3, 88};
  CHECK_THAT(dsc(t), Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-15));
  CHECK_THAT(jaccard(t), Catch::Matchers::WithinAbs(0.5, 1e-15));
}

TEST_CASE("dsc conventions and symmetry") {
  CHECK(dsc(ContingencyTable{0, 0, 0, 50}) == 1.0);   // both empty
  CHECK(dsc(ContingencyTable{0, 5, 0, 45}) == 0.0);   // prediction only
  CHECK(dsc(ContingencyTable{0, 0, 5, 45}) == 0.0);   // reference only
  CHECK(jaccard(ContingencyTable{0, 0, 0, 50}) == 1.0);
  // swapping pred and ref swaps fp and fn, leaving dsc unchanged
  const ContingencyTable t{7, 2, 9, 10};
  const ContingencyTable swapped{7, 9, 2, 10};
  CHECK(dsc(t) == dsc(swapped));
}

TEST_CASE("dsc and jaccard satisfy DSC = 2J / (1 + J)") {
  Rng rng(307);
  for (int trial = 0; trial < 100; ++trial) {
    const ContingencyTable t{static_cast<std::int64_t>(rng.next_range(0, 50)),
                             static_cast<std::int64_t>(rng.next_range(0, 50)),
                             static_cast<std::int64_t>(rng.next_range(0, 50)),
                             static_cast<std::int64_t>(rng.next_range(0, 50))};
    const double j = jaccard(t);
    CHECK_THAT(dsc(t), Catch::Matchers::WithinAbs(2.0 * j / (1.0 + j), 1e-12));
  }
}

TEST_CASE("contingency matches a naive recount, with and without a domain") {
  Rng rng(311);
  for (int trial = 0; trial < 40; ++trial) {
    const int w = 1 + static_cast<int>(rng.next_range(0, 40));
    const int h = 1 + static_cast<int>(rng.next_range(0, 40));
    const MaskImage pred = random_mask(rng, w, h, 0.5);
    const MaskImage ref = random_mask(rng, w, h, 0.4);
    const MaskImage dom = random_mask(rng, w, h, 0.7);
    CHECK(contingency(pred, ref) == oracle_contingency(pred, ref, nullptr));
    const ContingencyTable td = contingency(pred, ref, &dom);
    CHECK(td == oracle_contingency(pred, ref, &dom));
    std::int64_t dom_px = 0;
    for (auto v : dom.data()) dom_px += v;
    CHECK(td.total() == dom_px);
  }
}

TEST_CASE("contingency rejects mismatched geometry") {
  const MaskImage a(4, 4, 1, 1.0, 0);
  const MaskImage b(4, 5, 1, 1.0, 0);
  const MaskImage c(4, 4, 1, 2.0, 0);
  CHECK_THROWS_AS(contingency(a, b), std::invalid_argument);
  CHECK_THROWS_AS(contingency(a, c), std::invalid_argument);
}

TEST_CASE("summary stats on a fully determined table") {
  const ContingencyTable t{6, 3, 3, 88};
  const SummaryStats s = summary_stats(t);
  CHECK_THAT(*s.dsc, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-15));
  CHECK_THAT(*s.sensitivity, Catch::Matchers::WithinAbs(6.0 / 9.0, 1e-15));
  CHECK_THAT(*s.specificity, Catch::Matchers::WithinAbs(88.0 / 91.0, 1e-15));
  CHECK_THAT(*s.precision, Catch::Matchers::WithinAbs(6.0 / 9.0, 1e-15));
  CHECK_THAT(*s.npv, Catch::Matchers::WithinAbs(88.0 / 91.0, 1e-15));
  CHECK_THAT(*s.fpr, Catch::Matchers::WithinAbs(3.0 / 91.0, 1e-15));
  CHECK_THAT(*s.fnr, Catch::Matchers::WithinAbs(3.0 / 9.0, 1e-15));
  CHECK_THAT(*s.accuracy, Catch::Matchers::WithinAbs(0.94, 1e-15));
  CHECK_THAT(*s.balanced_accuracy,
             Catch::Matchers::WithinAbs(0.5 * (6.0 / 9.0 + 88.0 / 91.0), 1e-15));
  CHECK_THAT(*s.prevalence, Catch::Matchers::WithinAbs(0.09, 1e-15));
  CHECK_THAT(*s.predicted_positive_fraction, Catch::Matchers::WithinAbs(0.09, 1e-15));
  // MCC recomputed independently
  const double mcc = (6.0 * 88.0 - 3.0 * 3.0) / std::sqrt(9.0 * 9.0 * 91.0 * 91.0);
  CHECK_THAT(*s.mcc, Catch::Matchers::WithinAbs(mcc, 1e-12));
  CHECK(s.names().size() == 13);
  CHECK(s.values().size() == 13);
}

TEST_CASE("summary stats leave undefined ratios unset") {
  // no reference positives: sensitivity, fnr, balanced accuracy undefined
  const SummaryStats s = summary_stats(ContingencyTable{0, 2, 0, 98});
  CHECK_FALSE(s.sensitivity.has_value());
  CHECK_FALSE(s.fnr.has_value());
  CHECK_FALSE(s.balanced_accuracy.has_value());
  CHECK_FALSE(s.mcc.has_value());
  CHECK(s.specificity.has_value());
  CHECK(s.dsc.has_value());

  // empty table: everything except the both-empty dsc/jaccard is unset
  const SummaryStats e = summary_stats(ContingencyTable{});
  CHECK(*e.dsc == 1.0);
  CHECK_FALSE(e.accuracy.has_value());
  CHECK_FALSE(e.prevalence.has_value());
}

TEST_CASE("cohort mean CI on the frozen two-value example") {
  // values {0.8, 0.9}: mean 0.85, sd 0.0707107, t_{0.975,1} = 12.7062
  const MeanCI ci = cohort_mean_ci({0.8, 0.9}, 0.05);
  CHECK(ci.n == 2);
  CHECK_THAT(ci.mean, Catch::Matchers::WithinAbs(0.85, 1e-12));
  const double half = 12.7062 * 0.070710678 / std::sqrt(2.0);
  CHECK_THAT(ci.hi - ci.mean, Catch::Matchers::WithinAbs(half, 1e-4));
  CHECK_THAT(ci.mean - ci.lo, Catch::Matchers::WithinAbs(half, 1e-4));
}

TEST_CASE("cohort mean CI properties") {
  Rng rng(313);
  std::vector<double> v(20);
  for (auto& x : v) x = rng.next_double();
  const MeanCI ci = cohort_mean_ci(v, 0.05);
  CHECK(ci.lo <= ci.mean);
  CHECK(ci.mean <= ci.hi);

  // permutation invariance, bit-exact
  std::vector<double> shuffled = v;
  std::reverse(shuffled.begin(), shuffled.end());
  const MeanCI ci2 = cohort_mean_ci(shuffled, 0.05);
  CHECK(ci2.mean == ci.mean);
  CHECK(ci2.lo == ci.lo);
  CHECK(ci2.hi == ci.hi);

  // interval collapses as alpha -> 1 and widens as alpha -> 0
  const MeanCI wide = cohort_mean_ci(v, 0.01);
  const MeanCI narrow = cohort_mean_ci(v, 0.5);
  CHECK(wide.hi - wide.lo > ci.hi - ci.lo);
  CHECK(narrow.hi - narrow.lo < ci.hi - ci.lo);

  // constant sample: zero-width interval at the constant
  const MeanCI cst = cohort_mean_ci({0.7, 0.7, 0.7}, 0.05);
  CHECK_THAT(cst.lo, Catch::Matchers::WithinAbs(0.7, 1e-12));
  CHECK_THAT(cst.hi, Catch::Matchers::WithinAbs(0.7, 1e-12));
}

TEST_CASE("cohort mean CI input validation") {
  CHECK_THROWS_AS(cohort_mean_ci({0.5}, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(cohort_mean_ci({0.5, 0.6}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cohort_mean_ci({0.5, 0.6}, 1.0), std::invalid_argument);
}
