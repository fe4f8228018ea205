#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "equishrink/error.hpp"
#include "equishrink/radial_density.hpp"

using namespace equishrink;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// f_GT(t) as the scale mixture \int f_G(t/g) g^(-m/2) invgamma(g; a/2, b/2) dg.
double mixture_oracle(int m, double a, double b, double t) {
  auto integrand = [&](double g) {
    if (g == 0.0) return 0.0;
    const double log_fg = -0.5 * m * std::log(2.0 * std::numbers::pi) - 0.5 * t / g;
    const double log_ig = 0.5 * a * std::log(0.5 * b) - std::lgamma(0.5 * a) - (0.5 * a + 1.0) * std::log(g) -
                          0.5 * b / g;
    return std::exp(log_fg - 0.5 * m * std::log(g) + log_ig);
  };
  QuadConfig cfg;
  cfg.abs_tol = 1e-300;
  cfg.rel_tol = 1e-12;
  const double peak = (b + t) / (a + m + 2.0);
  const double pts[] = {0.0, 0.1 * peak, peak, 10.0 * peak, kInf};
  return integrate_1d(integrand, pts, cfg).value;
}
}  // namespace

TEST_CASE("sphere constant") {
  CHECK(sphere_constant(1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sphere_constant(2) == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(sphere_constant(4) == doctest::Approx(std::numbers::pi * std::numbers::pi).epsilon(1e-15));
  CHECK_THROWS_AS(sphere_constant(0), DomainError);
}

TEST_CASE("gaussian generator") {
  auto d = RadialDensity::gaussian(ProblemDim(2, 2));
  CHECK(d.value(0.0) == doctest::Approx(std::pow(2.0 * std::numbers::pi, -2.0)).epsilon(1e-14));
  CHECK(d.value(0.0) == doctest::Approx(0.0253303).epsilon(1e-6));
  for (double t : {0.0, 0.5, 3.0, 40.0}) {
    CHECK(d.tail_integral(t) == doctest::Approx(d.value(t)).epsilon(1e-15));
    CHECK(d.f_ratio(t) == 1.0);
  }
  CHECK(d.tail_integral(kInf) == 0.0);
  CHECK_THROWS_AS(d.value(-1.0), DomainError);

  auto custom = RadialDensity::custom(ProblemDim(2, 2), [&](double t) { return d.value(t); });
  for (double t : {0.0, 1.0, 7.5}) {
    CHECK(custom.value(t) == d.value(t));
    CHECK(custom.tail_integral(t) == doctest::Approx(d.tail_integral(t)).epsilon(1e-9));
  }
}

TEST_CASE("normalization and unit variance of built-in densities") {
  for (auto dims : {ProblemDim(3, 2), ProblemDim(5, 10), ProblemDim(10, 5)}) {
    const int m = dims.total();
    for (const auto& d : {RadialDensity::gaussian(dims), RadialDensity::generalized_t(dims, 8.0),
                          RadialDensity::generalized_t(dims, 5.0)}) {
      CAPTURE(d.id());
      CAPTURE(m);
      CHECK(std::abs(d.normalization().value - 1.0) < 1e-8);
      CHECK(std::abs(d.second_moment().value - m) < 1e-6);
    }
  }
}

TEST_CASE("generalized t matches its scale-mixture representation") {
  const ProblemDim dims(5, 10);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> log_t(-3.0, 3.0);
  for (auto [a, b] : {std::pair{8.0, 6.0}, std::pair{10.0, 8.0}, std::pair{5.0, 3.0}}) {
    auto d = RadialDensity::generalized_t(dims, a, b);
    for (int k = 0; k < 20; ++k) {
      const double t = std::pow(10.0, log_t(rng));
      CAPTURE(t);
      const double oracle = mixture_oracle(dims.total(), a, b, t);
      CHECK(std::abs(d.value(t) - oracle) <= 1e-8 * oracle);
    }
  }
}

TEST_CASE("generalized t tail integral and ratio against quadrature") {
  const ProblemDim dims(5, 10);
  auto d = RadialDensity::generalized_t(dims, 8.0, 8.0);
  CHECK(d.variance_override());
  QuadConfig cfg;
  cfg.abs_tol = 1e-300;
  cfg.rel_tol = 1e-12;
  for (double t : {0.0, 1.0, 10.0, 100.0}) {
    const double pts[] = {t, t + 10.0, kInf};
    const double oracle = 0.5 * integrate_1d([&](double s) { return d.value(s); }, pts, cfg).value;
    CHECK(std::abs(d.tail_integral(t) - oracle) < 1e-9);
    CHECK(d.f_ratio(t) == doctest::Approx(oracle / d.value(t)).epsilon(1e-9));
  }
  CHECK(d.f_ratio(0.0) > 0.0);
  CHECK(std::isfinite(d.tail_integral(0.0)));
  double prev = d.tail_integral(0.0);
  for (double t = 0.25; t < 1e4; t *= 1.7) {
    const double cur = d.tail_integral(t);
    CHECK(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("tail ratio bound at large t") {
  // F(t) <= t f(t) / (m + 2 + 2j + 2 eps) eventually when a > 4 + 2j + 2 eps.
  const ProblemDim dims(5, 10);
  const int m = dims.total();
  auto gt = RadialDensity::generalized_t(dims, 8.0);
  for (double t : {1e3, 1e4, 1e5}) {
    CHECK(gt.f_ratio(t) <= t / (m + 2.0 + 2.0 * 1.0 + 2.0 * 0.4));
  }
  auto g = RadialDensity::gaussian(dims);
  for (double t : {0.0, 1.0, 10.0}) CHECK(g.f_ratio(t) == 1.0);
  for (double t : {1e2, 1e3}) CHECK(g.f_ratio(t) <= t / (m + 6.0));
}

TEST_CASE("tail assumption report") {
  const ProblemDim dims(5, 10);
  auto g = RadialDensity::gaussian(dims).check_tail_assumption();
  CHECK(g.satisfies_f31);
  CHECK(g.satisfies_f32);

  auto t5 = RadialDensity::generalized_t(dims, 5.0).check_tail_assumption();
  CHECK(t5.satisfies_f31);
  CHECK_FALSE(t5.satisfies_f32);
  CHECK(t5.limsup_estimate == doctest::Approx(-0.5 * (15 + 5)).epsilon(1e-3));

  auto t4 = RadialDensity::generalized_t(dims, 3.5).check_tail_assumption();
  CHECK_FALSE(t4.satisfies_f31);
  auto t7 = RadialDensity::generalized_t(dims, 7.0).check_tail_assumption();
  CHECK(t7.satisfies_f32);
  for (const auto& r : {g, t5, t4, t7}) {
    if (r.satisfies_f32) CHECK(r.satisfies_f31);
  }

  auto bad = RadialDensity::custom(dims, [](double t) { return t > 1e4 ? std::numeric_limits<double>::quiet_NaN() : 1.0; });
  CHECK(bad.check_tail_assumption().indeterminate);
}

TEST_CASE("generalized t construction rules") {
  const ProblemDim dims(3, 2);
  CHECK_THROWS_AS(RadialDensity::generalized_t(dims, 2.0), DomainError);
  CHECK_THROWS_AS(RadialDensity::generalized_t(dims, 3.0, -1.0), DomainError);
  CHECK_FALSE(RadialDensity::generalized_t(dims, 8.0).variance_override());
  CHECK_THROWS_AS(RadialDensity::custom(dims, [](double) { return 0.0; }), DomainError);
}

TEST_CASE("sampling moments") {
  const ProblemDim dims(5, 10);
  constexpr int kDraws = 100000;
  Rng rng(20261015);
  auto g = RadialDensity::gaussian(dims);
  const auto zero = LocationScale(Eigen::VectorXd::Zero(5), 1.0);
  double sx = 0, sx2 = 0, su = 0, su2 = 0;
  for (int i = 0; i < kDraws; ++i) {
    auto obs = g.sample_observation(zero, rng);
    const double a = obs.x().squaredNorm();
    const double b = obs.s();
    sx += a;
    sx2 += a * a;
    su += b;
    su2 += b * b;
  }
  auto within = [&](double sum, double sum2, double target) {
    const double mean = sum / kDraws;
    const double se = std::sqrt((sum2 / kDraws - mean * mean) / kDraws);
    return std::abs(mean - target) < 4.0 * se;
  };
  CHECK(within(sx, sx2, 5.0));
  CHECK(within(su, su2, 10.0));

  auto t = RadialDensity::generalized_t(dims, 10.0, 8.0);
  double c = 0, c2 = 0;
  for (int i = 0; i < kDraws; ++i) {
    auto obs = t.sample_observation(LocationScale(Eigen::VectorXd::Zero(5), 2.0), rng);
    const double v = obs.x()[0] * obs.x()[0];
    c += v;
    c2 += v * v;
  }
  CHECK(within(c, c2, 0.5));
}

TEST_CASE("gaussian radial statistic is chi-square") {
  // Kolmogorov-Smirnov against chi-square_{p+n} using the regularized gamma CDF.
  const ProblemDim dims(3, 4);
  const int m = dims.total();
  auto g = RadialDensity::gaussian(dims);
  Rng rng(99);
  std::vector<double> r;
  const LocationScale loc(Eigen::Vector3d(1.0, -2.0, 0.5), 3.0);
  for (int i = 0; i < 100000; ++i) {
    auto obs = g.sample_observation(loc, rng);
    r.push_back(loc.eta() * ((obs.x() - loc.theta()).squaredNorm() + obs.s()));
  }
  std::sort(r.begin(), r.end());
  // P(chi2_7 <= x) by series for the lower incomplete gamma.
  auto cdf = [&](double x) {
    const double a = 0.5 * m;
    const double z = 0.5 * x;
    double term = 1.0 / a, sum = term;
    for (int k = 1; k < 500; ++k) {
      term *= z / (a + k);
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return std::exp(a * std::log(z) - z - std::lgamma(a)) * sum;
  };
  double dmax = 0.0;
  const double n = static_cast<double>(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double f = cdf(r[i]);
    dmax = std::max({dmax, std::abs(f - i / n), std::abs((i + 1) / n - f)});
  }
  // Asymptotic KS tail: P(D > d) ~ 2 exp(-2 n d^2); p > 1e-4 needs d < sqrt(ln(2e4) / (2n)).
  CHECK(dmax < std::sqrt(std::log(2e4) / (2.0 * n)));
}
