#include "equishrink/radial_density.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "equishrink/error.hpp"

namespace equishrink {

double sphere_constant(int m) {
  if (m < 1) throw DomainError("sphere_constant: m must be >= 1");
  return std::exp(0.5 * m * std::log(std::numbers::pi) - std::lgamma(0.5 * m));
}

RadialDensity RadialDensity::gaussian(ProblemDim dims) {
  RadialDensity d(Kind::Gaussian, dims);
  d.log_norm_ = -0.5 * dims.total() * std::log(2.0 * std::numbers::pi);
  return d;
}

RadialDensity RadialDensity::generalized_t(ProblemDim dims, double a) {
  if (!(a > 2.0)) throw DomainError("generalized t: unit variance needs a > 2 (b = a - 2)");
  return generalized_t(dims, a, a - 2.0);
}

RadialDensity RadialDensity::generalized_t(ProblemDim dims, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("generalized t: require a > 0 and b > 0");
  RadialDensity d(Kind::GeneralizedT, dims);
  d.a_ = a;
  d.b_ = b;
  d.variance_override_ = std::abs(b - (a - 2.0)) > 1e-12;
  const double m = dims.total();
  d.log_norm_ = std::lgamma(0.5 * (m + a)) - 0.5 * m * std::log(std::numbers::pi * b) - std::lgamma(0.5 * a);
  return d;
}

RadialDensity RadialDensity::custom(ProblemDim dims, std::function<double(double)> f,
                                    std::function<double(double)> f_prime, std::string label) {
  if (!f) throw DomainError("custom density: generator is empty");
  RadialDensity d(Kind::Custom, dims);
  d.f_ = std::make_shared<const std::function<double(double)>>(std::move(f));
  if (f_prime) d.f_prime_ = std::make_shared<const std::function<double(double)>>(std::move(f_prime));
  d.label_ = std::move(label);
  for (double t : {0.0, 1.0, 10.0}) {
    const double v = (*d.f_)(t);
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("custom density: f must be positive and finite");
  }
  return d;
}

std::string RadialDensity::id() const {
  switch (kind_) {
    case Kind::Gaussian:
      return "gaussian";
    case Kind::GeneralizedT: {
      std::ostringstream os;
      os.precision(17);
      os << "gt:" << a_ << "," << b_;
      return os.str();
    }
    case Kind::Custom:
      return label_;
  }
  return {};
}

double RadialDensity::log_value(double t) const {
  if (!(t >= 0.0)) throw DomainError("density: t must be nonnegative");
  switch (kind_) {
    case Kind::Gaussian:
      return log_norm_ - 0.5 * t;
    case Kind::GeneralizedT:
      return log_norm_ - 0.5 * (dims_.total() + a_) * std::log1p(t / b_);
    case Kind::Custom:
      return std::log((*f_)(t));
  }
  return 0.0;
}

double RadialDensity::value(double t) const {
  if (kind_ == Kind::Custom) {
    if (!(t >= 0.0)) throw DomainError("density: t must be nonnegative");
    return (*f_)(t);
  }
  return std::exp(log_value(t));
}

double RadialDensity::derivative(double t) const {
  switch (kind_) {
    case Kind::Gaussian:
      return -0.5 * value(t);
    case Kind::GeneralizedT:
      return -0.5 * (dims_.total() + a_) / (b_ + t) * value(t);
    case Kind::Custom: {
      if (f_prime_) return (*f_prime_)(t);
      const double h = 1e-5 * std::max(1.0, t);
      const double lo = std::max(0.0, t - h);
      return ((*f_)(t + h) - (*f_)(lo)) / (t + h - lo);
    }
  }
  return 0.0;
}

double RadialDensity::log_slope(double t) const {
  switch (kind_) {
    case Kind::Gaussian:
      return -0.5 * t;
    case Kind::GeneralizedT:
      return -0.5 * (dims_.total() + a_) * t / (b_ + t);
    case Kind::Custom:
      return t * derivative(t) / value(t);
  }
  return 0.0;
}

double RadialDensity::tail_integral(double t, const QuadConfig& cfg) const {
  if (!(t >= 0.0)) throw DomainError("tail integral: t must be nonnegative");
  if (std::isinf(t)) return 0.0;
  switch (kind_) {
    case Kind::Gaussian:
      // (1/2) \int_t^inf C e^{-s/2} ds = C e^{-t/2}
      return value(t);
    case Kind::GeneralizedT: {
      const double k = 0.5 * (dims_.total() + a_);
      return 0.5 * std::exp(log_norm_) * b_ * std::pow(1.0 + t / b_, 1.0 - k) / (k - 1.0);
    }
    case Kind::Custom: {
      auto f = [this](double s) { return (*f_)(s); };
      return 0.5 * integrate_1d(f, t, std::numeric_limits<double>::infinity(), cfg).value;
    }
  }
  return 0.0;
}

double RadialDensity::f_ratio(double t, const QuadConfig& cfg) const {
  switch (kind_) {
    case Kind::Gaussian:
      return 1.0;
    case Kind::GeneralizedT:
      return (b_ + t) / (dims_.total() + a_ - 2.0);
    case Kind::Custom:
      return tail_integral(t, cfg) / value(t);
  }
  return 0.0;
}

namespace {

QuadResult radial_moment(const RadialDensity& d, double power, const QuadConfig& cfg) {
  const int m = d.dims().total();
  const double cm = sphere_constant(m);
  auto g = [&](double t) {
    if (t == 0.0) return 0.0;
    return cm * std::exp(power * std::log(t) + d.log_value(t));
  };
  const double inf = std::numeric_limits<double>::infinity();
  const double pts[] = {0.0, 0.5 * m, 2.0 * m, 8.0 * m, inf};
  return integrate_1d(g, pts, cfg);
}

}  // namespace

QuadResult RadialDensity::normalization(const QuadConfig& cfg) const {
  return radial_moment(*this, 0.5 * dims_.total() - 1.0, cfg);
}

QuadResult RadialDensity::second_moment(const QuadConfig& cfg) const {
  return radial_moment(*this, 0.5 * dims_.total(), cfg);
}

TailReport RadialDensity::check_tail_assumption() const {
  TailReport report;
  constexpr int kPerDecade = 10;
  for (int k = 0; k <= 4 * kPerDecade; ++k) {
    const double t = std::pow(10.0, 2.0 + static_cast<double>(k) / kPerDecade);
    report.grid.push_back(t);
    report.log_slopes.push_back(log_slope(t));
  }
  double limsup = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < report.grid.size(); ++i) {
    if (report.grid[i] < 1e5 * (1.0 - 1e-12)) continue;
    const double v = report.log_slopes[i];
    if (!std::isfinite(v)) {
      report.indeterminate = true;
      continue;
    }
    limsup = std::max(limsup, v);
  }
  report.limsup_estimate = limsup;
  if (report.indeterminate) return report;
  const double half_m = 0.5 * dims_.total();
  report.satisfies_f31 = limsup < -half_m - 2.0;
  report.satisfies_f32 = limsup < -half_m - 3.0;
  return report;
}

double RadialDensity::draw_mixing_scale(Rng& rng) const {
  switch (kind_) {
    case Kind::Gaussian:
      return 1.0;
    case Kind::GeneralizedT: {
      // g ~ inverse-gamma(shape a/2, scale b/2)
      std::gamma_distribution<double> gamma(0.5 * a_, 1.0);
      return 0.5 * b_ / gamma(rng);
    }
    case Kind::Custom:
      break;
  }
  throw DomainError("sampling is only available for the Gaussian and generalized t densities");
}

Observation RadialDensity::sample_observation(const LocationScale& loc, Rng& rng) const {
  if (loc.theta().size() != dims_.p) throw DimensionMismatch("sample_observation: theta has wrong length");
  const double g = draw_mixing_scale(rng);
  const double sd = std::sqrt(g / loc.eta());
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(dims_.p);
  for (int j = 0; j < dims_.p; ++j) x[j] = loc.theta()[j] + sd * normal(rng);
  Eigen::VectorXd u(dims_.n);
  for (int j = 0; j < dims_.n; ++j) u[j] = sd * normal(rng);
  return Observation(std::move(x), std::move(u));
}

}  // namespace equishrink
