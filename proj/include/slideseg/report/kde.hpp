#ifndef SLIDESEG_REPORT_KDE_HPP
#define SLIDESEG_REPORT_KDE_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace slideseg {

inline double sample_std(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

/// Scott's rule bandwidth for d-dimensional KDE: sigma * n^(-1/(d+4)).
/// Degenerate samples (zero spread) fall back to a tiny positive bandwidth
/// so evaluation stays defined.
inline double scott_bandwidth(const std::vector<double>& v, int dims = 1) {
  if (v.size() < 2) throw std::invalid_argument("scott_bandwidth: need n >= 2");
  const double sigma = sample_std(v);
  const double h = sigma * std::pow(static_cast<double>(v.size()), -1.0 / (dims + 4));
  return h > 0.0 ? h : 1e-9;
}

/// Gaussian KDE density at point x.
inline double kde_1d(const std::vector<double>& sample, double bandwidth, double x) {
  if (sample.empty() || !(bandwidth > 0.0)) throw std::invalid_argument("kde_1d: bad input");
  const double norm = 1.0 / (std::sqrt(2.0 * M_PI) * bandwidth * sample.size());
  double sum = 0.0;
  for (double s : sample) {
    const double u = (x - s) / bandwidth;
    sum += std::exp(-0.5 * u * u);
  }
  return norm * sum;
}

/// 2-D Gaussian KDE with a diagonal bandwidth matrix.
inline double kde_2d(const std::vector<double>& xs, const std::vector<double>& ys, double hx,
                     double hy, double x, double y) {
  if (xs.size() != ys.size() || xs.empty() || !(hx > 0.0) || !(hy > 0.0))
    throw std::invalid_argument("kde_2d: bad input");
  const double norm = 1.0 / (2.0 * M_PI * hx * hy * xs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double ux = (x - xs[i]) / hx;
    const double uy = (y - ys[i]) / hy;
    sum += std::exp(-0.5 * (ux * ux + uy * uy));
  }
  return norm * sum;
}

/// Type-7 (linear interpolation) sample quantile.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile: empty sample");
  q = std::clamp(q, 0.0, 1.0);
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace slideseg

#endif  // SLIDESEG_REPORT_KDE_HPP
