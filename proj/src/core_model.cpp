#include "equishrink/core_model.hpp"

#include <cmath>
#include <string>

#include "equishrink/error.hpp"

namespace equishrink {

namespace {
constexpr double kOrthogonalityTol = 1e-10;
}

ProblemDim::ProblemDim(int p_, int n_) : p(p_), n(n_) {
  if (p < 1) throw DomainError("ProblemDim: p must be >= 1, got " + std::to_string(p));
  if (n < 2) throw DomainError("ProblemDim: n must be >= 2, got " + std::to_string(n));
}

void ProblemDim::require_shrinkage() const {
  if (p < 3) {
    throw DomainError("shrinkage rules require p >= 3, got p = " + std::to_string(p));
  }
}

Observation::Observation(Eigen::VectorXd x, Eigen::VectorXd u)
    : x_(std::move(x)), u_(std::move(u)), s_(u_->squaredNorm()) {}

Observation::Observation(Eigen::VectorXd x, double s) : x_(std::move(x)), s_(s) {
  if (!(s >= 0.0)) throw DomainError("Observation: s must be nonnegative");
}

LocationScale::LocationScale(Eigen::VectorXd theta, double eta)
    : theta_(std::move(theta)), eta_(eta), lambda_(0.0) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("LocationScale: eta must be positive");
  lambda_ = eta_ * theta_.squaredNorm();
}

LocationScale LocationScale::aligned(int p, double lambda, double eta) {
  if (!(lambda >= 0.0)) throw DomainError("LocationScale: lambda must be nonnegative");
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  theta[0] = std::sqrt(lambda / eta);
  return LocationScale(std::move(theta), eta);
}

double w_statistic(const Observation& obs) {
  if (obs.s() == 0.0) throw DegenerateScale("W statistic undefined: s = ||u||^2 is zero");
  return obs.x().squaredNorm() / obs.s();
}

Observation group_act(const Observation& obs, double gamma, const Eigen::MatrixXd& rotation) {
  if (!(gamma > 0.0)) throw DomainError("group_act: gamma must be positive");
  if (rotation.rows() != obs.p() || rotation.cols() != obs.p()) {
    throw DimensionMismatch("group_act: rotation must be p x p");
  }
  const auto identity = Eigen::MatrixXd::Identity(obs.p(), obs.p());
  if ((rotation.transpose() * rotation - identity).norm() > kOrthogonalityTol) {
    throw DomainError("group_act: matrix is not orthogonal");
  }
  Eigen::VectorXd x = gamma * (rotation * obs.x());
  if (obs.u()) return Observation(std::move(x), Eigen::VectorXd(gamma * *obs.u()));
  return Observation(std::move(x), gamma * gamma * obs.s());
}

double scaled_quadratic_loss(const Eigen::VectorXd& delta, const Eigen::VectorXd& theta, double eta) {
  if (delta.size() != theta.size()) throw DimensionMismatch("loss: delta and theta differ in length");
  if (!(eta > 0.0)) throw DomainError("loss: eta must be positive");
  return eta * (delta - theta).squaredNorm();
}

}  // namespace equishrink
