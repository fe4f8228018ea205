#include "equishrink/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "equishrink/error.hpp"

namespace equishrink {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTableLogLo = -32.236;  // ~1e-14
constexpr double kTableLogHi = 16.118;   // ~1e7
constexpr int kTableNodes = 1601;
// Below this w the shrinkage factor is taken from the w -> 0 limit.
constexpr double kOriginW = 1e-12;

double log_sphere_area(int dim) {
  // surface area of the unit sphere in R^dim
  return std::log(2.0) + 0.5 * dim * std::log(std::numbers::pi) - std::lgamma(0.5 * dim);
}

}  // namespace

PosteriorEngine::PosteriorEngine(RadialDensity density, PriorSpec prior, QuadConfig cfg)
    : density_(std::move(density)), prior_(std::move(prior)), cfg_(cfg), p_(density_.dims().p) {
  cfg_.validate();
  density_.dims().require_shrinkage();
  if (prior_.p() != p_) throw DimensionMismatch("posterior: prior and density disagree on p");
  if (!(prior_.local_exponent() > -0.5)) {
    throw DomainError("posterior: prior diverges at the origin faster than lambda^(-1/2)");
  }
  k_ = 0.5 * (2.0 * p_ + density_.dims().n);
  low_exponent_ = prior_.local_exponent() + 1.0 - 0.5 * p_;

  QuadConfig gcfg;
  gcfg.abs_tol = 1e-300;
  gcfg.rel_tol = 1e-11;

  const double k = k_;
  auto base_points = [&](double s) {
    std::vector<double> pts{0.0};
    for (double c : {k / 8.0, k / 2.0, k, 2.0 * k, 4.0 * k, 16.0 * k, 64.0 * k}) pts.push_back(c);
    if (s > 0.0) {
      for (double c : {1.0 / s, (1.0 + prior_.b()) / s}) {
        if (c > 0.0 && c < 64.0 * k) pts.push_back(c);
      }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    pts.push_back(kInf);
    return pts;
  };

  if (prior_.kind() == PriorSpec::Kind::Power && prior_.taper_index() == 0) {
    const double a0 = low_exponent_;
    if (density_.kind() == RadialDensity::Kind::GeneralizedT &&
        !(k + a0 - 0.5 * (density_.dims().total() + density_.a()) < -1.0)) {
      throw DomainError("posterior: G(s) diverges for this prior and density (tail too heavy)");
    }
    auto integrand = [&](double t) {
      if (t == 0.0) return 0.0;
      return std::exp((k + a0) * std::log(t) + density_.log_value(t));
    };
    const auto pts = base_points(0.0);
    const double total = integrate_1d(integrand, pts, gcfg).value;
    closed_form_ = true;
    power_coeff_ = prior_.scale() * total / sphere_constant(p_);
    return;
  }

  auto g_exact = [&](double s) {
    auto integrand = [&](double t) {
      if (t == 0.0) return 0.0;
      const double bar = prior_.bar_value_fast(t * s);
      if (bar == 0.0) return 0.0;
      return std::exp(k * std::log(t) + density_.log_value(t) + std::log(bar));
    };
    return integrate_1d(integrand, base_points(s), gcfg).value;
  };

  const double h = (kTableLogHi - kTableLogLo) / (kTableNodes - 1);
  std::vector<double> y(kTableNodes);
  for (int j = 0; j < kTableNodes; ++j) {
    const double g = g_exact(std::exp(kTableLogLo + h * j));
    if (!(g > 0.0) || !std::isfinite(g)) throw DomainError("posterior: G(s) is not positive and finite");
    y[j] = std::log(g);
  }
  log_g_ = UniformSpline(kTableLogLo, h, std::move(y));
  high_slope_ = log_g_.derivative(log_g_.x_end());
  double err = 0.0;
  for (int j = 5; j + 1 < kTableNodes; j += 16) {
    const double x = kTableLogLo + h * (j + 0.5);
    err = std::max(err, std::abs(std::expm1(log_g_.value(x) - std::log(g_exact(std::exp(x))))));
  }
  table_error_ = err;
}

double PosteriorEngine::log_g(double s) const {
  const double x = std::log(s);
  if (closed_form_) return std::log(power_coeff_) + low_exponent_ * x;
  if (x < log_g_.x_begin()) return log_g_.value(log_g_.x_begin()) + low_exponent_ * (x - log_g_.x_begin());
  if (x > log_g_.x_end()) return log_g_.value(log_g_.x_end()) + high_slope_ * (x - log_g_.x_end());
  return log_g_.value(x);
}

double PosteriorEngine::g_value(double s) const { return std::exp(log_g(s)); }

double PosteriorEngine::g_log_slope(double s) const {
  if (closed_form_) return low_exponent_;
  const double x = std::log(s);
  if (x < log_g_.x_begin()) return low_exponent_;
  if (x > log_g_.x_end()) return high_slope_;
  return log_g_.derivative(x);
}

PosteriorIntegrals PosteriorEngine::integrals(double w) const {
  if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("posterior: w must be a finite nonnegative number");
  if (w < kOriginW) return at_origin();

  const double r = std::sqrt(w);
  const double k1 = k_ + 1.0;
  const int p = p_;
  const int n = density_.dims().n;

  // Tolerance weight for the numerator: its target accuracy scales with r * psi.
  const double c = (p - 2.0) / (n + 2.0);
  const double psi_guess = std::max(c / (w + c + 1.0), 1e-5);
  const detail::Vec<2> weights{1.0, 1.0 / (r * psi_guess)};

  int evaluations = 0;
  // Inner tolerance: relative for the first (M1-only) pass, then absolute and
  // derived from the M1 estimate so that far-field panels are not over-resolved.
  double m1_estimate = 0.0;
  detail::VecTolerance<2> inner_tol{1e-300, 1e-7, {1.0, 0.0}, cfg_.max_depth, cfg_.max_intervals};
  auto angular = [&](double rho, double radial_weight) -> detail::Vec<2> {
    const double d2 = (r - rho) * (r - rho) + 1.0;
    const double rr = 4.0 * r * rho;
    const double rho2 = rho * rho;
    auto f = [&](double phi) -> detail::Vec<2> {
      const double sh = std::sin(0.5 * phi);
      const double ch = std::cos(0.5 * phi);
      const double q1 = d2 + rr * sh * sh;
      const double q2 = d2 + rr * ch * ch;
      const double kern1 = std::exp(-k1 * std::log(q1) + log_g(rho2 / q1));
      const double kern2 = std::exp(-k1 * std::log(q2) + log_g(rho2 / q2));
      const double jac = std::pow(std::sin(phi), p - 2);
      const double sum = kern1 + kern2;
      return {jac * sum, jac * (r * sum - rho * std::cos(phi) * (kern1 - kern2))};
    };
    constexpr double kHalfPi = 0.5 * std::numbers::pi;
    const double phi_c = std::sqrt(d2 / (r * rho));
    std::vector<double> pts{0.0};
    const double head = std::min(phi_c, kHalfPi);
    for (int j = 1; j < cfg_.angular_panels; ++j) pts.push_back(head * j / cfg_.angular_panels);
    for (double m : {1.0, 4.0, 16.0}) {
      if (m * phi_c < kHalfPi) pts.push_back(m * phi_c);
    }
    pts.push_back(kHalfPi);
    detail::VecTolerance<2> tol = inner_tol;
    if (m1_estimate > 0.0) {
      const double spread = 1.0 + std::abs(rho - r);
      tol.abs_tol = 1e-2 * cfg_.rel_tol * m1_estimate / (radial_weight * 2.0 * spread * spread);
    }
    auto res = detail::adaptive_integrate<2>(f, pts, tol);
    evaluations += res.evaluations;
    if (!res.converged) throw NonConvergence("posterior: angular integral did not converge", res.value[0], res.error[0]);
    return res.value;
  };

  // y in [0, 1]: rho = y^e removes the rho^(2 alpha0 + 1) behaviour at the origin; y > 1: rho = y.
  const double e = 1.0 / (2.0 * prior_.local_exponent() + 2.0);
  auto radial = [&](double y) -> detail::Vec<2> {
    double rho, jac;
    if (y <= 1.0) {
      rho = std::pow(y, e);
      jac = e * rho / y;
    } else {
      rho = y;
      jac = 1.0;
    }
    const double scale = std::exp((p - 1) * std::log(rho)) * jac;
    if (!(scale > 0.0)) return {0.0, 0.0};
    auto v = angular(rho, scale);
    return {scale * v[0], scale * v[1]};
  };

  std::vector<double> pts{0.0, 1.0};
  const double lo = std::max(1.0, r - 3.0);
  const double hi = r + 3.0;
  if (hi > 1.0) {
    const int panels = std::max(cfg_.radial_panels, 1);
    for (int j = 0; j <= panels; ++j) {
      const double y = lo + (hi - lo) * j / panels;
      if (y > pts.back()) pts.push_back(y);
    }
  }
  for (double y : {r - 0.5, r + 0.5}) {
    if (y > 1.0) pts.push_back(y);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const double tail_start = std::max(pts.back(), r + 8.0);
  if (tail_start > pts.back()) pts.push_back(tail_start);
  pts.push_back(kInf);

  const detail::VecTolerance<2> coarse_tol{1e-300, 1e-5, {1.0, 0.0}, cfg_.max_depth, cfg_.max_intervals};
  auto coarse = detail::adaptive_integrate<2>(radial, pts, coarse_tol);
  evaluations += coarse.evaluations;
  if (!(coarse.value[0] > 0.0)) throw NonConvergence("posterior: M1 estimate is not positive", coarse.value[0], 0.0);
  m1_estimate = coarse.value[0];
  inner_tol = {0.0, cfg_.rel_tol * 1e-2, weights, cfg_.max_depth, cfg_.max_intervals};

  const detail::VecTolerance<2> outer_tol{1e-300, cfg_.rel_tol, weights, cfg_.max_depth, cfg_.max_intervals};
  auto res = detail::adaptive_integrate<2>(radial, pts, outer_tol);
  evaluations += res.evaluations;
  if (!res.converged) throw NonConvergence("posterior: radial integral did not converge", res.value[0], res.error[0]);

  const double area = std::exp(log_sphere_area(p - 1));
  PosteriorIntegrals out;
  out.m1 = area * res.value[0];
  const double numerator = area * res.value[1];
  out.psi = res.value[1] / (r * res.value[0]);
  out.m2_dot_z_over_norm = r * out.m1 - numerator;
  out.achieved_error = std::abs(out.psi) * res.error[0] / res.value[0] + res.error[1] / (r * res.value[0]) +
                       2.0 * (table_error_ + prior_.table_error()) * std::abs(out.psi);
  out.evaluations = evaluations;
  if (!(out.m1 > 0.0)) throw NonConvergence("posterior: M1 is not positive", out.m1, res.error[0]);
  return out;
}

PosteriorIntegrals PosteriorEngine::at_origin() const {
  // psi(0) = 1 - (2/p) \int rho^(p+1) (-dK/dq) / \int rho^(p-1) K with q = rho^2 + 1 and
  // -dK/dq = q^(-k-2) G(s) (k + 1 + dlogG/dlogs).
  const int p = p_;
  const double k1 = k_ + 1.0;
  const double e = 1.0 / (2.0 * prior_.local_exponent() + 2.0);
  auto radial = [&](double y) -> detail::Vec<2> {
    double rho, jac;
    if (y <= 1.0) {
      rho = std::pow(y, e);
      jac = e * rho / y;
    } else {
      rho = y;
      jac = 1.0;
    }
    const double q = rho * rho + 1.0;
    const double s = rho * rho / q;
    const double kern = std::exp(-k1 * std::log(q)) * g_value(s);
    const double scale = std::exp((p - 1) * std::log(rho)) * jac;
    return {scale * kern, scale * rho * rho * kern / q * (k1 + g_log_slope(s))};
  };
  const double pts[] = {0.0, 1.0, 2.0, 4.0, 8.0, kInf};
  const detail::VecTolerance<2> tol{1e-300, cfg_.rel_tol * 1e-2, {1.0, 1.0}, cfg_.max_depth, cfg_.max_intervals};
  auto res = detail::adaptive_integrate<2>(radial, std::span<const double>(pts), tol);
  if (!res.converged) throw NonConvergence("posterior: origin integral did not converge", res.value[0], res.error[0]);
  PosteriorIntegrals out;
  const double ratio = res.value[1] / res.value[0];
  out.m1 = std::exp(log_sphere_area(p)) * res.value[0];
  out.m2_dot_z_over_norm = 0.0;
  out.psi = 1.0 - 2.0 / p * ratio;
  out.achieved_error = 2.0 / p * std::abs(ratio) * (res.error[0] / res.value[0] + res.error[1] / std::abs(res.value[1])) +
                       2.0 * (table_error_ + prior_.table_error()) * std::abs(out.psi);
  out.evaluations = res.evaluations;
  return out;
}

PosteriorIntegrals posterior_integrals(double w, const RadialDensity& d, const PriorSpec& prior, const QuadConfig& cfg) {
  return PosteriorEngine(d, prior, cfg).integrals(w);
}

}  // namespace equishrink
