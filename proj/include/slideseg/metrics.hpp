#ifndef SLIDESEG_METRICS_HPP
#define SLIDESEG_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slideseg/raster.hpp"
#include "slideseg/special.hpp"

namespace slideseg {

/// Pixel overlap counts between a predicted and a reference mask.
struct ContingencyTable {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }

  ContingencyTable& operator+=(const ContingencyTable& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend ContingencyTable operator+(ContingencyTable a, const ContingencyTable& b) { return a += b; }
  friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;
};

/// Count TP/FP/FN/TN pixels. When a domain mask is given, only pixels with
/// domain != 0 are evaluated.
inline ContingencyTable contingency(const MaskImage& pred, const MaskImage& ref,
                                    const MaskImage* domain = nullptr) {
  auto same_geometry = [&](const MaskImage& m) {
    return m.width() == pred.width() && m.height() == pred.height() &&
           m.spacing() == pred.spacing();
  };
  if (!same_geometry(ref) || (domain && !same_geometry(*domain)))
    throw std::invalid_argument("contingency: dimension or spacing mismatch");

  ContingencyTable t;
  for (int y = 0; y < pred.height(); ++y) {
    const std::uint8_t* p = pred.row(y);
    const std::uint8_t* r = ref.row(y);
    const std::uint8_t* d = domain ? domain->row(y) : nullptr;
    for (int x = 0; x < pred.width(); ++x) {
      if (d && !d[x]) continue;
      if (p[x]) {
        if (r[x]) ++t.tp;
        else ++t.fp;
      } else {
        if (r[x]) ++t.fn;
        else ++t.tn;
      }
    }
  }
  return t;
}

/// Dice similarity coefficient: 2 tp / (2 tp + fp + fn). Two empty masks
/// agree perfectly and score 1.
inline double dsc(const ContingencyTable& t) {
  const std::int64_t denom = 2 * t.tp + t.fp + t.fn;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(t.tp) / static_cast<double>(denom);
}

/// Jaccard index; both-empty convention 1 to stay consistent with dsc.
inline double jaccard(const ContingencyTable& t) {
  const std::int64_t denom = t.tp + t.fp + t.fn;
  if (denom == 0) return 1.0;
  return static_cast<double>(t.tp) / static_cast<double>(denom);
}

/// Contingency table summary statistics. Entries whose denominator is zero
/// are left unset rather than propagated as NaN.
struct SummaryStats {
  std::optional<double> dsc;
  std::optional<double> jaccard;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> precision;
  std::optional<double> npv;
  std::optional<double> fpr;
  std::optional<double> fnr;
  std::optional<double> accuracy;
  std::optional<double> balanced_accuracy;
  std::optional<double> mcc;
  std::optional<double> prevalence;
  std::optional<double> predicted_positive_fraction;

  static const std::vector<std::string>& names() {
    static const std::vector<std::string> n = {
        "dsc", "jaccard", "sensitivity", "specificity", "precision", "npv", "fpr",
        "fnr", "accuracy", "balanced_accuracy", "mcc", "prevalence",
        "predicted_positive_fraction"};
    return n;
  }

  std::vector<std::optional<double>> values() const {
    return {dsc, jaccard, sensitivity, specificity, precision, npv, fpr,
            fnr, accuracy, balanced_accuracy, mcc, prevalence, predicted_positive_fraction};
  }
};

inline SummaryStats summary_stats(const ContingencyTable& t) {
  auto ratio = [](std::int64_t num, std::int64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  SummaryStats s;
  s.dsc = dsc(t);
  s.jaccard = jaccard(t);
  s.sensitivity = ratio(t.tp, t.tp + t.fn);
  s.specificity = ratio(t.tn, t.tn + t.fp);
  s.precision = ratio(t.tp, t.tp + t.fp);
  s.npv = ratio(t.tn, t.tn + t.fn);
  if (s.sensitivity) s.fnr = 1.0 - *s.sensitivity;
  if (s.specificity) s.fpr = 1.0 - *s.specificity;
  s.accuracy = ratio(t.tp + t.tn, t.total());
  if (s.sensitivity && s.specificity)
    s.balanced_accuracy = 0.5 * (*s.sensitivity + *s.specificity);
  {
    const double d = std::sqrt(static_cast<double>(t.tp + t.fp)) *
                     std::sqrt(static_cast<double>(t.tp + t.fn)) *
                     std::sqrt(static_cast<double>(t.tn + t.fp)) *
                     std::sqrt(static_cast<double>(t.tn + t.fn));
    if (d > 0.0)
      s.mcc = (static_cast<double>(t.tp) * static_cast<double>(t.tn) -
               static_cast<double>(t.fp) * static_cast<double>(t.fn)) / d;
  }
  s.prevalence = ratio(t.tp + t.fn, t.total());
  s.predicted_positive_fraction = ratio(t.tp + t.fp, t.total());
  return s;
}

/// Cohort mean with a two-sided Student-t confidence interval.
struct MeanCI {
  std::size_t n = 0;
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double alpha = 0.05;
};

inline MeanCI cohort_mean_ci(const std::vector<double>& values, double alpha = 0.05) {
  if (values.size() < 2) throw std::invalid_argument("cohort_mean_ci: need n >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("cohort_mean_ci: alpha outside (0,1)");
  const std::size_t n = values.size();
  // summation over sorted values so the result is permutation-invariant
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double v : sorted) sum += v;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : sorted) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const double t = student_t_quantile(1.0 - alpha / 2.0, static_cast<double>(n - 1));
  const double half = t * sd / std::sqrt(static_cast<double>(n));
  return MeanCI{n, mean, mean - half, mean + half, alpha};
}

}  // namespace slideseg

#endif  // SLIDESEG_METRICS_HPP
