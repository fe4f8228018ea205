#include <cmath>
#include <vector>

#include "doctest.h"
#include "equishrink/error.hpp"
#include "equishrink/interp.hpp"

using namespace equishrink;

TEST_CASE("natural spline reproduces a smooth function") {
  const double h = 0.05;
  std::vector<double> y;
  for (int i = 0; i <= 200; ++i) y.push_back(std::sin(i * h));
  UniformSpline s(0.0, h, y);
  for (double x = 0.5; x < 9.5; x += 0.137) {
    CHECK(std::abs(s.value(x) - std::sin(x)) < 1e-6);
    CHECK(std::abs(s.derivative(x) - std::cos(x)) < 1e-4);
  }
  CHECK(s.value(0.0) == doctest::Approx(0.0));
  CHECK(s.value(10.0) == doctest::Approx(std::sin(10.0)).epsilon(1e-12));
  CHECK_THROWS_AS(UniformSpline(0.0, 1.0, {1.0, 2.0}), DomainError);
}

TEST_CASE("linear data is reproduced exactly") {
  UniformSpline s(-1.0, 0.5, {-3.0, -2.0, -1.0, 0.0, 1.0});
  for (double x = -1.0; x <= 1.0; x += 0.1) CHECK(s.value(x) == doctest::Approx(2.0 * x - 1.0).epsilon(1e-13));
}

TEST_CASE("monotone cubic preserves monotonicity") {
  std::vector<double> y{0.0, 0.0, 0.1, 5.0, 5.1, 5.1, 9.0};
  MonotoneCubic m(0.0, 1.0, y);
  double prev = m.value(0.0);
  for (double x = 0.0; x <= 6.0; x += 0.01) {
    const double v = m.value(x);
    CHECK(v >= prev - 1e-14);
    prev = v;
  }
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(m.value(static_cast<double>(i)) == doctest::Approx(y[i]));
}
