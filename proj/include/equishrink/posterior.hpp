#pragma once

#include <memory>

#include "equishrink/interp.hpp"
#include "equishrink/prior.hpp"
#include "equishrink/quadrature.hpp"
#include "equishrink/radial_density.hpp"

namespace equishrink {

struct PosteriorIntegrals {
  double m1 = 0.0;
  double m2_dot_z_over_norm = 0.0;  // z^T M2 / ||z||
  double psi = 0.0;                 // 1 - z^T M2 / (||z||^2 M1)
  double achieved_error = 0.0;      // absolute error estimate on psi
  int evaluations = 0;
};

/// Evaluates M1(z, pi), z^T M2(z, pi) and the Bayes-equivariant shrinkage
/// factor for ||z||^2 = w.
///
/// The eta integral is taken exactly: with q = ||z - theta||^2 + 1 and
/// k = (2p + n)/2 the integrand over eta reduces to q^(-k-1) G(||theta||^2 / q),
/// G(s) = \int_0^inf t^k f(t) pi-bar(t s) dt. G is a closed-form power law for
/// untapered power priors and a log-log spline table otherwise. theta is then
/// written in polar form around z and the angle is folded onto [0, pi/2] so
/// that the numerator keeps full relative precision as w -> 0.
class PosteriorEngine {
 public:
  PosteriorEngine(RadialDensity density, PriorSpec prior, QuadConfig cfg = {});

  const RadialDensity& density() const noexcept { return density_; }
  const PriorSpec& prior() const noexcept { return prior_; }
  const QuadConfig& config() const noexcept { return cfg_; }

  PosteriorIntegrals integrals(double w) const;
  double psi(double w) const { return integrals(w).psi; }

  /// G(s) and d log G / d log s.
  double g_value(double s) const;
  double g_log_slope(double s) const;
  /// Largest relative interpolation error of the G table at held-out points.
  double table_error() const noexcept { return table_error_; }

 private:
  PosteriorIntegrals at_origin() const;
  double log_g(double s) const;

  RadialDensity density_;
  PriorSpec prior_;
  QuadConfig cfg_;
  int p_;
  double k_;            // (2p + n) / 2
  double low_exponent_;  // G(s) ~ s^low_exponent_ as s -> 0
  bool closed_form_ = false;
  double power_coeff_ = 0.0;  // G(s) = power_coeff_ * s^low_exponent_ when closed_form_
  UniformSpline log_g_;
  double high_slope_ = 0.0;
  double table_error_ = 0.0;
};

/// One-shot convenience wrapper around PosteriorEngine.
PosteriorIntegrals posterior_integrals(double w, const RadialDensity& d, const PriorSpec& prior,
                                       const QuadConfig& cfg = {});

}  // namespace equishrink
