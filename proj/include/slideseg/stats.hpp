#ifndef SLIDESEG_STATS_HPP
#define SLIDESEG_STATS_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "slideseg/special.hpp"

namespace slideseg {

/// 1-based ranks; tied values receive the average of their rank positions.
inline std::vector<double> ranks(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("ranks: empty input");
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument("ranks: non-finite value");
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && x[order[j]] == x[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) r[order[k]] = avg;
    i = j;
  }
  return r;
}

/// Pearson sample correlation. Returns nullopt when either side has zero
/// variance.
inline std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("pearson: need equal lengths, n >= 3");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Spearman's rho: Pearson correlation of the rank vectors.
inline std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks(x), ranks(y));
}

/// Two-sided p value for rho under the null, via t = rho sqrt((n-2)/(1-rho^2))
/// with n - 2 degrees of freedom.
inline double spearman_p(double rho, std::size_t n) {
  if (std::fabs(rho) > 1.0) throw std::invalid_argument("spearman_p: |rho| > 1");
  if (n < 3) throw std::invalid_argument("spearman_p: need n >= 3");
  if (std::fabs(rho) == 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = rho * std::sqrt(df / (1.0 - rho * rho));
  return std::clamp(student_t_sf_two_sided(t, df), 0.0, 1.0);
}

/// Fisher-z confidence interval:
/// tanh(arctanh(r) +/- z_{1-alpha/2} / sqrt(n-3)).
inline std::pair<double, double> fisher_ci(double r, std::size_t n, double alpha = 0.05) {
  if (std::fabs(r) >= 1.0) throw std::invalid_argument("fisher_ci: |r| must be < 1");
  if (n < 4) throw std::invalid_argument("fisher_ci: need n >= 4");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("fisher_ci: alpha outside (0,1)");
  const double z = std::atanh(r);
  const double se = 1.0 / std::sqrt(static_cast<double>(n - 3));
  const double q = normal_quantile(1.0 - alpha / 2.0);
  return {std::tanh(z - q * se), std::tanh(z + q * se)};
}

/// Full Spearman analysis as reported: rho, p, CI, significance at 0.05.
struct CorrelationResult {
  std::size_t n = 0;
  std::optional<double> rho;
  std::optional<double> p;
  std::optional<std::pair<double, double>> ci;
  bool significant = false;
};

inline CorrelationResult correlate(const std::vector<double>& x, const std::vector<double>& y,
                                   double alpha = 0.05) {
  CorrelationResult res;
  res.n = x.size();
  res.rho = spearman(x, y);
  if (res.rho) {
    res.p = spearman_p(*res.rho, res.n);
    if (res.n >= 4 && std::fabs(*res.rho) < 1.0) res.ci = fisher_ci(*res.rho, res.n, alpha);
    res.significant = *res.p < 0.05;
  }
  return res;
}

}  // namespace slideseg

#endif  // SLIDESEG_STATS_HPP
