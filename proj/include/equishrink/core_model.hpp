#pragma once

#include <optional>

#include <Eigen/Dense>

namespace equishrink {

/// Dimensions of the location vector (p) and of the residual vector (n).
struct ProblemDim {
  int p;
  int n;

  /// Validates p >= 1 and n >= 2; throws DomainError otherwise.
  ProblemDim(int p, int n);

  int total() const noexcept { return p + n; }
  bool supports_shrinkage() const noexcept { return p >= 3; }
  /// Throws DomainError unless p >= 3.
  void require_shrinkage() const;

  friend bool operator==(const ProblemDim&, const ProblemDim&) = default;
};

/// An observation (x, u). Estimators only ever look at x and s = ||u||^2,
/// so u is optional and s is always stored.
class Observation {
 public:
  Observation(Eigen::VectorXd x, Eigen::VectorXd u);
  Observation(Eigen::VectorXd x, double s);

  const Eigen::VectorXd& x() const noexcept { return x_; }
  const std::optional<Eigen::VectorXd>& u() const noexcept { return u_; }
  double s() const noexcept { return s_; }
  int p() const noexcept { return static_cast<int>(x_.size()); }

 private:
  Eigen::VectorXd x_;
  std::optional<Eigen::VectorXd> u_;
  double s_;
};

/// Parameter point (theta, eta); lambda = eta * ||theta||^2 is the maximal invariant.
class LocationScale {
 public:
  LocationScale(Eigen::VectorXd theta, double eta);

  /// theta = sqrt(lambda / eta) * e_1.
  static LocationScale aligned(int p, double lambda, double eta = 1.0);

  const Eigen::VectorXd& theta() const noexcept { return theta_; }
  double eta() const noexcept { return eta_; }
  double lambda() const noexcept { return lambda_; }

 private:
  Eigen::VectorXd theta_;
  double eta_;
  double lambda_;
};

/// W = ||x||^2 / s. Throws DegenerateScale when s == 0.
double w_statistic(const Observation& obs);

/// Group I action: (x, s) -> (gamma Gamma x, gamma^2 s). u, when present,
/// is rescaled by gamma. Gamma must be orthogonal to 1e-10 (Frobenius).
Observation group_act(const Observation& obs, double gamma, const Eigen::MatrixXd& rotation);

/// eta * ||delta - theta||^2.
double scaled_quadratic_loss(const Eigen::VectorXd& delta, const Eigen::VectorXd& theta, double eta);

}  // namespace equishrink
