#pragma once

#include <vector>

namespace equishrink {

/// Natural cubic spline through (x0 + i h, y_i). Outside the grid the end
/// cubic is not extrapolated; callers handle the ranges themselves.
class UniformSpline {
 public:
  UniformSpline() = default;
  UniformSpline(double x0, double h, std::vector<double> y);

  double x_begin() const noexcept { return x0_; }
  double x_end() const noexcept { return x0_ + h_ * static_cast<double>(y_.size() - 1); }
  bool empty() const noexcept { return y_.empty(); }

  double value(double x) const;
  double derivative(double x) const;

 private:
  std::size_t locate(double x, double& t) const;

  double x0_ = 0.0;
  double h_ = 1.0;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives
};

/// Monotone piecewise cubic Hermite interpolant (Fritsch-Carlson slopes) on a
/// uniform grid.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(double x0, double h, std::vector<double> y);

  double x_begin() const noexcept { return x0_; }
  double x_end() const noexcept { return x0_ + h_ * static_cast<double>(y_.size() - 1); }
  bool empty() const noexcept { return y_.empty(); }

  double value(double x) const;

 private:
  double x0_ = 0.0;
  double h_ = 1.0;
  std::vector<double> y_;
  std::vector<double> d_;  // slopes at the nodes
};

}  // namespace equishrink
