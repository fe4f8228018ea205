#pragma once

// Linear regression with intercept, reduced to the location-scale problem:
// x = (Z'Z)^(1/2) beta_hat and s = residual sum of squares, with p predictors
// and n = m - p - 1.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "equishrink/core_model.hpp"
#include "equishrink/estimators.hpp"
#include "equishrink/risk_lab.hpp"

namespace equishrink {

struct RegressionData {
  Eigen::VectorXd y;
  Eigen::MatrixXd z;  // m x p, uncentered
  std::string response_name;
  std::vector<std::string> predictor_names;
};

struct CanonicalForm {
  Eigen::VectorXd x;
  double s = 0.0;
  double ybar = 0.0;
  double r_squared = 0.0;
  double w = 0.0;  // ||x||^2 / s = R^2 / (1 - R^2)
  Eigen::VectorXd beta_hat;
  Eigen::MatrixXd half_gram;  // symmetric square root of Z'Z (centered Z)
  Eigen::VectorXd t_values;   // x / sqrt(s)
  double gram_condition = 0.0;
  int m = 0;
  int p = 0;
  int n = 0;  // m - p - 1

  /// Throws DomainError when n < 2 (too few residual degrees of freedom for the rules).
  ProblemDim dims() const { return ProblemDim(p, n); }
  Observation observation() const { return Observation(x, s); }
};

/// Centers the predictors, solves least squares by column-pivoted QR and forms
/// the symmetric root of the centered Gram matrix by eigendecomposition.
/// Errors: m <= p + 1, Gram condition number >= 1e12 (DomainError), constant
/// response (DegenerateScale).
CanonicalForm canonicalize(const RegressionData& data);

/// 1 - psi(W).
double shrink_factor(const CanonicalForm& c, const ShrinkageRule& rule);
/// (1 - psi(W)) beta_hat; DegenerateScale when s = 0.
Eigen::VectorXd shrink_coefficients(const CanonicalForm& c, const ShrinkageRule& rule);

/// eta ||Z (b_est - b_true)||^2, Z as given (centered by the caller).
double predictive_loss(const Eigen::VectorXd& beta_est, const Eigen::VectorXd& beta_true, const Eigen::MatrixXd& z,
                       double eta);
/// Same loss through the half Gram matrix: eta ||H (b_est - b_true)||^2.
double predictive_loss_half_gram(const Eigen::VectorXd& beta_est, const Eigen::VectorXd& beta_true,
                                 const Eigen::MatrixXd& half_gram, double eta);

/// Monte Carlo predictive risk with Gaussian errors: y = 1 + Z beta + eta^(-1/2) eps,
/// each draw is canonicalized and shrunk, and the loss uses the centered Z.
/// Its canonical counterpart is the risk at lambda = eta ||H beta||^2.
RiskPoint mc_predictive_risk(const ShrinkageRule& rule, const Eigen::MatrixXd& z, const Eigen::VectorXd& beta,
                             double eta, std::int64_t n_reps, std::uint64_t seed, const McConfig& mc = {});

/// CSV with a header row; `response` names the response column, every other
/// column is a numeric predictor. Empty or NA cells are rejected with their
/// line number (ParseError).
RegressionData read_regression_csv(std::istream& in, const std::string& response);

}  // namespace equishrink
