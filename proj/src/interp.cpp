#include "equishrink/interp.hpp"

#include <algorithm>
#include <cmath>

#include "equishrink/error.hpp"

namespace equishrink {

UniformSpline::UniformSpline(double x0, double h, std::vector<double> y) : x0_(x0), h_(h), y_(std::move(y)) {
  const std::size_t n = y_.size();
  if (n < 3 || !(h > 0.0)) throw DomainError("UniformSpline: need >= 3 nodes and h > 0");
  // Tridiagonal system for natural end conditions (m_0 = m_{n-1} = 0).
  m_.assign(n, 0.0);
  std::vector<double> c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double rhs = 6.0 * (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / (h * h);
    const double denom = 4.0 - c[i - 1];
    c[i] = 1.0 / denom;
    d[i] = (rhs - d[i - 1]) / denom;
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m_[i] = d[i] - c[i] * m_[i + 1];
  }
}

std::size_t UniformSpline::locate(double x, double& t) const {
  const double u = (x - x0_) / h_;
  const auto last = static_cast<double>(y_.size() - 2);
  double k = std::floor(u);
  k = std::clamp(k, 0.0, last);
  t = u - k;
  return static_cast<std::size_t>(k);
}

double UniformSpline::value(double x) const {
  double t;
  const std::size_t k = locate(x, t);
  const double s = 1.0 - t;
  const double h2 = h_ * h_ / 6.0;
  return s * y_[k] + t * y_[k + 1] + h2 * ((s * s * s - s) * m_[k] + (t * t * t - t) * m_[k + 1]);
}

double UniformSpline::derivative(double x) const {
  double t;
  const std::size_t k = locate(x, t);
  const double s = 1.0 - t;
  return (y_[k + 1] - y_[k]) / h_ + h_ / 6.0 * ((1.0 - 3.0 * s * s) * m_[k] + (3.0 * t * t - 1.0) * m_[k + 1]);
}

MonotoneCubic::MonotoneCubic(double x0, double h, std::vector<double> y) : x0_(x0), h_(h), y_(std::move(y)) {
  const std::size_t n = y_.size();
  if (n < 2 || !(h > 0.0)) throw DomainError("MonotoneCubic: need >= 2 nodes and h > 0");
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y_[i + 1] - y_[i]) / h;
  d_.assign(n, 0.0);
  d_[0] = delta[0];
  d_[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d_[i] = (delta[i - 1] * delta[i] <= 0.0) ? 0.0 : 0.5 * (delta[i - 1] + delta[i]);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (delta[i] == 0.0) {
      d_[i] = d_[i + 1] = 0.0;
      continue;
    }
    const double a = d_[i] / delta[i];
    const double b = d_[i + 1] / delta[i];
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double tau = 3.0 / std::sqrt(r);
      d_[i] = tau * a * delta[i];
      d_[i + 1] = tau * b * delta[i];
    }
  }
}

double MonotoneCubic::value(double x) const {
  const double u = (x - x0_) / h_;
  double k = std::clamp(std::floor(u), 0.0, static_cast<double>(y_.size() - 2));
  const double t = u - k;
  const auto i = static_cast<std::size_t>(k);
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[i] + h10 * h_ * d_[i] + h01 * y_[i + 1] + h11 * h_ * d_[i + 1];
}

}  // namespace equishrink
