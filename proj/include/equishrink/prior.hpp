#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "equishrink/interp.hpp"
#include "equishrink/quadrature.hpp"
#include "equishrink/radial_density.hpp"

namespace equishrink {

/// Tapering sequence h_i(lambda) = 1 - loglog(lambda + e) / loglog(lambda + e + i).
class BlythSequence {
 public:
  explicit BlythSequence(int i);

  int index() const noexcept { return i_; }
  double value(double lambda) const;
  double derivative(double lambda) const;

 private:
  int i_;
};

/// loglog(lambda + e) written as log1p(log1p(lambda / e)); exactly 0 at lambda = 0.
double loglog_shifted(double lambda);

struct PriorMoments {
  double value;       // pi-bar(lambda)
  double derivative;  // d pi-bar / d lambda
};

/// Prior pi(lambda) on lambda = eta ||theta||^2 for a location dimension p,
/// together with pi-bar(lambda) = c_p^-1 lambda^(1 - p/2) pi(lambda).
class PriorSpec {
 public:
  enum class Kind { Power, Strawderman, Custom };

  /// pi(lambda) = lambda^alpha; alpha > -1.
  static PriorSpec power(int p, double alpha);
  /// Scale-mixture prior with mixing weight (xi - b)^alpha (1 + xi)^beta on xi > b.
  /// Requires alpha > -1, b >= 0 and alpha + beta - p/2 < -1 (otherwise the
  /// mixture integral diverges).
  static PriorSpec strawderman(int p, double alpha, double beta, double b);
  /// User-supplied pi and optionally pi'. When local_exponent is not given it
  /// is estimated from the log-log slope of pi on [1e-10, 1e-9].
  static PriorSpec custom(int p, std::function<double(double)> pi, std::function<double(double)> pi_prime = {},
                          std::string label = "custom", std::optional<double> local_exponent = std::nullopt);

  /// pi * h_i^2. Tapering an already tapered prior replaces the index.
  PriorSpec tapered(int i) const;
  /// Rescaled so that \int_0^inf pi = 1. Throws DomainError for improper priors.
  PriorSpec normalized() const;

  Kind kind() const noexcept { return kind_; }
  int p() const noexcept { return p_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double b() const noexcept { return b_; }
  int taper_index() const noexcept { return taper_; }
  double scale() const noexcept { return scale_; }
  std::string id() const;

  /// pi(lambda) ~ lambda^e near 0; e = alpha (power, Strawderman with b = 0),
  /// p/2 - 1 (Strawderman with b > 0). Tapering does not change it.
  double local_exponent() const noexcept { return local_exponent_; }

  double value(double lambda) const;
  double bar_value(double lambda) const;
  /// pi-bar and its derivative by direct evaluation (quadrature for Strawderman).
  PriorMoments bar_moments(double lambda) const;
  /// pi-bar through the interpolation table for Strawderman priors (exact
  /// evaluation for the other kinds). Used inside posterior integrands.
  double bar_value_fast(double lambda) const;
  /// Largest relative error of the pi-bar table measured at held-out midpoints
  /// (0 when no table is used).
  double table_error() const;

  /// kappa(lambda) = lambda pi'(lambda) / pi(lambda).
  double kappa(double lambda) const;

  /// Closed form for Strawderman, quadrature for tapered and custom priors,
  /// +infinity for power priors.
  double total_mass(const QuadConfig& cfg = {}) const;
  /// Whether \int pi < infinity; for Strawderman alpha + beta < -1.
  bool is_proper() const;

  /// Draw lambda ~ pi for proper, untapered Strawderman priors.
  double sample_lambda(Rng& rng) const;

 private:
  struct Table;

  PriorSpec(Kind kind, int p) : kind_(kind), p_(p) {}
  double base_bar(double lambda) const;
  double base_value(double lambda) const;
  double base_kappa(double lambda) const;
  void build_table();

  Kind kind_;
  int p_;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  double b_ = 0.0;
  double local_exponent_ = 0.0;
  double scale_ = 1.0;
  int taper_ = 0;
  std::shared_ptr<const std::function<double(double)>> pi_;
  std::shared_ptr<const std::function<double(double)>> pi_prime_;
  std::string label_;
  std::shared_ptr<const Table> table_;
};

/// pi-bar of the Strawderman mixture and its derivative by quadrature over
/// v = log(xi - b), with closed-form tails. lambda > 0 when b = 0.
PriorMoments strawderman_bar(int p, double alpha, double beta, double b, double lambda, bool with_derivative);

}  // namespace equishrink
