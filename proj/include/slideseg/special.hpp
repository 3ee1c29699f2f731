#ifndef SLIDESEG_SPECIAL_HPP
#define SLIDESEG_SPECIAL_HPP

#include <cmath>
#include <limits>
#include <stdexcept>

namespace slideseg {

namespace detail {

inline double log_gamma(double x) {
  // Lanczos, g=7, n=9; |rel err| < 1e-13 for x > 0.
  static const double coef[9] = {
      0.99999999999980993,  676.5203681218851,    -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,  12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5)
    return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
  x -= 1.0;
  double a = coef[0];
  const double t = x + 7.5;
  for (int i = 1; i < 9; ++i) a += coef[i] / (x + i);
  return 0.5 * std::log(2.0 * M_PI) + (x + 0.5) * std::log(t) - t + std::log(a);
}

// Continued fraction for the regularized incomplete beta function.
inline double beta_cf(double a, double b, double x) {
  constexpr double eps = 1e-15;
  constexpr double fpmin = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw std::runtime_error("beta_cf: no convergence");
}

}  // namespace detail

/// Regularized incomplete beta function I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = detail::log_gamma(a + b) - detail::log_gamma(a) -
                          detail::log_gamma(b) + a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(ln_front) * detail::beta_cf(a, b, x) / a;
  return 1.0 - std::exp(detail::log_gamma(a + b) - detail::log_gamma(b) - detail::log_gamma(a) +
                        b * std::log1p(-x) + a * std::log(x)) *
                   detail::beta_cf(b, a, 1.0 - x) / b;
}

/// CDF of Student's t with df degrees of freedom.
inline double student_t_cdf(double t, double df) {
  if (df <= 0.0) throw std::invalid_argument("student_t_cdf: df must be positive");
  if (t == 0.0) return 0.5;
  const double x = df / (df + t * t);
  const double p = 0.5 * incomplete_beta(df / 2.0, 0.5, x);
  return t > 0.0 ? 1.0 - p : p;
}

/// Two-sided survival mass beyond |t|.
inline double student_t_sf_two_sided(double t, double df) {
  const double x = df / (df + t * t);
  return incomplete_beta(df / 2.0, 0.5, x);
}

/// Quantile of Student's t (inverse CDF), bisection refined to 1e-12.
inline double student_t_quantile(double p, double df) {
  if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("student_t_quantile: p outside (0,1)");
  if (p == 0.5) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  const double target = p > 0.5 ? p : 1.0 - p;
  while (student_t_cdf(hi, df) < target) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_cdf(mid, df) < target) lo = mid;
    else hi = mid;
    if (hi - lo < 1e-12 * std::max(1.0, hi)) break;
  }
  const double q = 0.5 * (lo + hi);
  return p > 0.5 ? q : -q;
}

/// Inverse of erf, rational approximation refined with two Newton steps.
inline double erf_inv(double x) {
  if (x <= -1.0 || x >= 1.0) throw std::invalid_argument("erf_inv: |x| must be < 1");
  if (x == 0.0) return 0.0;
  // Giles (2012) style initial guess
  double w = -std::log((1.0 - x) * (1.0 + x));
  double p;
  if (w < 5.0) {
    w -= 2.5;
    p = 2.81022636e-08;
    p = 3.43273939e-07 + p * w;
    p = -3.5233877e-06 + p * w;
    p = -4.39150654e-06 + p * w;
    p = 0.00021858087 + p * w;
    p = -0.00125372503 + p * w;
    p = -0.00417768164 + p * w;
    p = 0.246640727 + p * w;
    p = 1.50140941 + p * w;
  } else {
    w = std::sqrt(w) - 3.0;
    p = -0.000200214257;
    p = 0.000100950558 + p * w;
    p = 0.00134934322 + p * w;
    p = -0.00367342844 + p * w;
    p = 0.00573950773 + p * w;
    p = -0.0076224613 + p * w;
    p = 0.00943887047 + p * w;
    p = 1.00167406 + p * w;
    p = 2.83297682 + p * w;
  }
  double y = p * x;
  const double two_over_sqrt_pi = 2.0 / std::sqrt(M_PI);
  for (int i = 0; i < 2; ++i)
    y -= (std::erf(y) - x) / (two_over_sqrt_pi * std::exp(-y * y));
  return y;
}

/// Standard normal quantile z_p.
inline double normal_quantile(double p) {
  if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("normal_quantile: p outside (0,1)");
  return std::sqrt(2.0) * erf_inv(2.0 * p - 1.0);
}

}  // namespace slideseg

#endif  // SLIDESEG_SPECIAL_HPP
