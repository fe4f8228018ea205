#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "equishrink/quadrature.hpp"

using namespace equishrink;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("integrate_1d basic oracles") {
  QuadConfig cfg;
  CHECK(integrate_1d([](double t) { return std::exp(-t); }, 0.0, kInf, cfg).value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(integrate_1d([](double t) { return 1.0 / std::sqrt(t); }, 0.0, 1.0, cfg).value ==
        doctest::Approx(2.0).epsilon(1e-8));
  CHECK(integrate_1d([](double t) { return t * t * t * std::exp(-t); }, 0.0, kInf, cfg).value ==
        doctest::Approx(6.0).epsilon(1e-10));
  CHECK(integrate_1d([](double) { return 1.0; }, 2.0, 2.0, cfg).value == 0.0);
}

TEST_CASE("integrate_1d with breakpoints and error bound") {
  QuadConfig cfg;
  const double pts[] = {0.0, 1.0, 10.0, kInf};
  auto r = integrate_1d([](double t) { return 1.0 / (1.0 + t * t); }, pts, cfg);
  CHECK(r.value == doctest::Approx(std::numbers::pi / 2).epsilon(1e-10));
  CHECK(r.error <= std::max(cfg.abs_tol, cfg.rel_tol * r.value));
}

TEST_CASE("non-convergence carries the best estimate") {
  QuadConfig cfg;
  cfg.max_intervals = 3;
  cfg.rel_tol = 1e-14;
  cfg.abs_tol = 1e-300;
  try {
    integrate_1d([](double t) { return std::sin(1.0 / (t + 1e-3)); }, 0.0, 1.0, cfg);
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(std::isfinite(e.best_estimate()));
    CHECK(e.error_estimate() > 0.0);
  }
}

TEST_CASE("QuadConfig validation") {
  QuadConfig cfg;
  cfg.abs_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = QuadConfig{};
  cfg.max_depth = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("Gauss-Jacobi rule integrates the weight exactly") {
  const auto rule = gauss_jacobi_unit(12, -0.5, 0.3);
  double mass = 0.0;
  double first = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    mass += rule.weights[i];
    first += rule.weights[i] * rule.nodes[i];
  }
  // B(1.3, 0.5) and B(2.3, 0.5)
  CHECK(mass == doctest::Approx(std::beta(1.3, 0.5)).epsilon(1e-12));
  CHECK(first == doctest::Approx(std::beta(2.3, 0.5)).epsilon(1e-12));
  CHECK_THROWS_AS(gauss_jacobi_unit(4, -1.0, 0.0), DomainError);
}

TEST_CASE("beta-weighted integrals, both paths") {
  QuadConfig cfg;
  auto one = [](double) { return 1.0; };
  auto id = [](double t) { return t; };
  CHECK(integrate_beta_weighted(one, -0.5, cfg) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(integrate_beta_weighted(id, 0.0, cfg) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(integrate_beta_weighted(id, -0.5, cfg) == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
  CHECK(integrate_beta_weighted_gj(id, -0.5, 16) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

  auto g = [](double t) { return std::pow(t, 1.5) * std::pow(1.0 + 3.0 * t, -8.5); };
  for (double alpha : {0.0, -0.2, -0.45}) {
    CHECK(std::abs(integrate_beta_weighted(g, alpha, cfg) - integrate_beta_weighted_gj(g, alpha, 64)) < 1e-9);
  }
  CHECK_THROWS_AS(integrate_beta_weighted(one, -1.0, cfg), DomainError);
}

TEST_CASE("jacobi-weighted integral against Beta function") {
  QuadConfig cfg;
  auto r = integrate_jacobi_weighted([](double) { return 1.0; }, -0.7, -0.4, 0.0, cfg);
  CHECK(r.value == doctest::Approx(std::beta(0.3, 0.6)).epsilon(1e-9));
  // sharp feature near zero: \int_0^1 t^0.5 (1+1e6 t)^-3 dt is dominated by t ~ 1e-6
  auto sharp = [](double t) { return std::pow(1.0 + 1e6 * t, -3.0); };
  auto a = integrate_jacobi_weighted(sharp, 0.5, 0.0, 1e-6, cfg);
  const double pts[] = {0.0, 1e-8, 1e-6, 1e-4, 1.0};
  auto b = integrate_1d([&](double t) { return std::sqrt(t) * sharp(t); }, pts, cfg);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-8));
}
