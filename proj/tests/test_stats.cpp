#include <algorithm>
#include <cmath>
#include <numeric>

#include <catch2/catch_amalgamated.hpp>

#include "slideseg/rng.hpp"
#include "slideseg/stats.hpp"

using namespace slideseg;

namespace {

// numeric integration of the t density as an independent CDF oracle.
// Substituting x = sqrt(df) tan(theta) turns the tail integral into
// norm sqrt(df) \int cos^{df-1}(theta) dtheta over a finite range, so no
// tail mass is lost to truncation.
double numeric_t_sf_two_sided(double t, double df) {
  const double a = std::fabs(t);
  const double log_norm = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                          0.5 * std::log(df * M_PI);
  const double scale = std::exp(log_norm) * std::sqrt(df);
  auto integrand = [&](double theta) { return std::pow(std::cos(theta), df - 1.0); };
  const double lo = std::atan(a / std::sqrt(df));
  const double hi = M_PI / 2.0;
  const int steps = 200000;  // even
  const double h = (hi - lo) / steps;
  double sum = integrand(lo) + integrand(hi);
  for (int i = 1; i < steps; ++i) sum += integrand(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return 2.0 * scale * sum * h / 3.0;
}

}  // namespace

TEST_CASE("ranks: plain, tied, and reversed inputs") {
  CHECK(ranks({10.0, 30.0, 20.0}) == std::vector<double>{1.0, 3.0, 2.0});
  CHECK(ranks({1.0, 2.0, 2.0, 3.0}) == std::vector<double>{1.0, 2.5, 2.5, 4.0});
  CHECK(ranks({5.0, 5.0, 5.0}) == std::vector<double>{2.0, 2.0, 2.0});
  CHECK(ranks({3.0, 2.0, 1.0}) == std::vector<double>{3.0, 2.0, 1.0});
  CHECK_THROWS_AS(ranks({}), std::invalid_argument);
  CHECK_THROWS_AS(ranks({1.0, std::nan("")}), std::invalid_argument);
}

TEST_CASE("rank permutation equivariance") {
  Rng rng(401);
  std::vector<double> x(15);
  for (auto& v : x) v = rng.uniform(-5.0, 5.0);
  x[3] = x[9];  // force a tie
  const std::vector<double> r = ranks(x);
  std::vector<std::size_t> perm(x.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::vector<double> xp(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xp[i] = x[perm[i]];
  const std::vector<double> rp = ranks(xp);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(rp[i] == r[perm[i]]);
}

TEST_CASE("frozen spearman example") {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> y = {2, 1, 4, 3, 5};
  const auto rho = spearman(x, y);
  REQUIRE(rho.has_value());
  CHECK_THAT(*rho, Catch::Matchers::WithinAbs(0.8, 1e-12));
}

TEST_CASE("spearman is invariant under strictly monotone transforms") {
  Rng rng(409);
  std::vector<double> x(20);
  std::vector<double> y(20);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.uniform(0.1, 10.0);
    y[i] = rng.uniform(-3.0, 3.0);
  }
  const auto base = spearman(x, y);
  std::vector<double> fx = x;
  std::vector<double> gy = y;
  for (auto& v : fx) v = std::log(v);        // monotone increasing
  for (auto& v : gy) v = std::exp(0.5 * v);  // monotone increasing
  const auto same = spearman(fx, gy);
  REQUIRE(base.has_value());
  REQUIRE(same.has_value());
  CHECK_THAT(*same, Catch::Matchers::WithinAbs(*base, 1e-12));

  // decreasing transform of one side flips the sign
  std::vector<double> neg = x;
  for (auto& v : neg) v = -v;
  const auto flipped = spearman(neg, y);
  CHECK_THAT(*flipped, Catch::Matchers::WithinAbs(-*base, 1e-12));
}

TEST_CASE("spearman on constant input is undefined") {
  CHECK_FALSE(spearman({1.0, 1.0, 1.0, 1.0}, {1.0, 2.0, 3.0, 4.0}).has_value());
  CHECK(spearman({1.0, 2.0, 3.0, 4.0}, {4.0, 3.0, 2.0, 1.0}).has_value());
  CHECK_THROWS_AS(spearman({1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(spearman({1.0, 2.0, 3.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("spearman perfect monotone association") {
  const std::vector<double> x = {1, 2, 3, 4, 5, 6};
  std::vector<double> y = x;
  for (auto& v : y) v = v * v + 1.0;
  CHECK_THAT(*spearman(x, y), Catch::Matchers::WithinAbs(1.0, 1e-12));
  std::reverse(y.begin(), y.end());
  CHECK_THAT(*spearman(x, y), Catch::Matchers::WithinAbs(-1.0, 1e-12));
}

TEST_CASE("frozen p value for rho 0.8 at n 5") {
  // t = 0.8 sqrt(3 / 0.36) = 2.309401; two-sided p with 3 df
  const double p = spearman_p(0.8, 5);
  CHECK_THAT(p, Catch::Matchers::WithinAbs(0.104088, 1e-4));
  CHECK_THAT(p, Catch::Matchers::WithinAbs(numeric_t_sf_two_sided(2.3094010767585034, 3.0), 1e-6));
}

TEST_CASE("spearman_p matches numeric t integration over a grid") {
  for (const double rho : {0.1, 0.3, -0.5, 0.7, -0.9}) {
    for (const std::size_t n : {5u, 10u, 30u}) {
      const double df = static_cast<double>(n - 2);
      const double t = rho * std::sqrt(df / (1.0 - rho * rho));
      CHECK_THAT(spearman_p(rho, n),
                 Catch::Matchers::WithinAbs(numeric_t_sf_two_sided(t, df), 1e-8));
    }
  }
  CHECK(spearman_p(0.0, 10) == 1.0);
  CHECK(spearman_p(1.0, 10) == 0.0);
  CHECK(spearman_p(-1.0, 10) == 0.0);
  CHECK(spearman_p(0.5, 8) == spearman_p(-0.5, 8));
  CHECK_THROWS_AS(spearman_p(1.5, 10), std::invalid_argument);
  CHECK_THROWS_AS(spearman_p(0.5, 2), std::invalid_argument);
}

TEST_CASE("p value shrinks with |rho| and with n") {
  CHECK(spearman_p(0.6, 10) < spearman_p(0.4, 10));
  CHECK(spearman_p(0.4, 30) < spearman_p(0.4, 10));
}

TEST_CASE("frozen Fisher intervals") {
  // r = 0 at n = 12: bounds +/- tanh(1.9599640 / 3)
  const auto [lo0, hi0] = fisher_ci(0.0, 12);
  CHECK_THAT(hi0, Catch::Matchers::WithinAbs(0.573902, 1e-5));
  CHECK_THAT(lo0, Catch::Matchers::WithinAbs(-0.573902, 1e-5));

  // r = 0.5 at n = 28: tanh(atanh(0.5) -/+ 1.9599640 / 5)
  const auto [lo1, hi1] = fisher_ci(0.5, 28);
  CHECK_THAT(lo1, Catch::Matchers::WithinAbs(0.156028, 1e-5));
  CHECK_THAT(hi1, Catch::Matchers::WithinAbs(0.735818, 1e-5));
}

TEST_CASE("Fisher interval properties") {
  Rng rng(419);
  for (int trial = 0; trial < 50; ++trial) {
    const double r = rng.uniform(-0.95, 0.95);
    const std::size_t n = 5 + rng.next_range(0, 200);
    const auto [lo, hi] = fisher_ci(r, n);
    CHECK(lo < r);
    CHECK(r < hi);
    CHECK(lo > -1.0);
    CHECK(hi < 1.0);
    // wider sample narrows the interval
    const auto [lo2, hi2] = fisher_ci(r, n + 100);
    CHECK(hi2 - lo2 < hi - lo);
    // antisymmetry: ci(-r) = -reversed ci(r)
    const auto [nlo, nhi] = fisher_ci(-r, n);
    CHECK_THAT(nlo, Catch::Matchers::WithinAbs(-hi, 1e-12));
    CHECK_THAT(nhi, Catch::Matchers::WithinAbs(-lo, 1e-12));
  }
  CHECK_THROWS_AS(fisher_ci(1.0, 20), std::invalid_argument);
  CHECK_THROWS_AS(fisher_ci(0.5, 3), std::invalid_argument);
}

TEST_CASE("correlate bundles the pieces consistently") {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> y = {2, 1, 4, 3, 5};
  const CorrelationResult res = correlate(x, y);
  CHECK(res.n == 5);
  REQUIRE(res.rho.has_value());
  CHECK_THAT(*res.rho, Catch::Matchers::WithinAbs(0.8, 1e-12));
  REQUIRE(res.p.has_value());
  CHECK_THAT(*res.p, Catch::Matchers::WithinAbs(0.104088, 1e-4));
  REQUIRE(res.ci.has_value());
  CHECK(res.ci->first < 0.8);
  CHECK(res.ci->second > 0.8);
  CHECK_FALSE(res.significant);

  // constant covariate: nothing defined
  const CorrelationResult flat = correlate({1, 1, 1, 1}, {1, 2, 3, 4});
  CHECK_FALSE(flat.rho.has_value());
  CHECK_FALSE(flat.p.has_value());
  CHECK_FALSE(flat.significant);

  // strong association on a larger sample is significant
  std::vector<double> a(20);
  std::vector<double> b(20);
  std::iota(a.begin(), a.end(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = a[i] + (i % 3) * 0.1;
  const CorrelationResult strong = correlate(a, b);
  CHECK(strong.significant);
}
