#include "equishrink/quadrature.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

namespace equishrink {

void QuadConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw DomainError("QuadConfig: tolerances must be positive");
  if (max_depth < 1) throw DomainError("QuadConfig: max_depth must be >= 1");
  if (angular_panels < 1 || radial_panels < 1) throw DomainError("QuadConfig: panel counts must be >= 1");
  if (max_intervals < 1) throw DomainError("QuadConfig: max_intervals must be >= 1");
}

GaussRule gauss_jacobi_unit(int n, double alpha, double beta) {
  if (n < 1) throw DomainError("gauss_jacobi_unit: n must be >= 1");
  if (!(alpha > -1.0) || !(beta > -1.0)) throw DomainError("gauss_jacobi_unit: exponents must exceed -1");
  // Jacobi weight on [-1, 1] is (1 - x)^a (1 + x)^b; with t = (1 + x) / 2 this
  // becomes 2^(a+b) (1 - t)^a t^b, so a = alpha and b = beta.
  const double a = alpha;
  const double b = beta;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    jacobi(k, k) = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    if (k + 1 < n) {
      const double j = k + 1.0;
      const double sj = 2.0 * j + a + b;
      double beta_j;
      if (j == 1.0) {
        beta_j = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
      } else {
        beta_j = 4.0 * j * (j + a) * (j + b) * (j + a + b) / (sj * sj * (sj + 1.0) * (sj - 1.0));
      }
      jacobi(k, k + 1) = jacobi(k + 1, k) = std::sqrt(beta_j);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  const double log_mu0 = (a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                         std::lgamma(a + b + 2.0);
  const double mu0 = std::exp(log_mu0);
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double scale = std::pow(2.0, -(a + b + 1.0));
  for (int i = 0; i < n; ++i) {
    const double x = solver.eigenvalues()[i];
    const double v0 = solver.eigenvectors()(0, i);
    rule.nodes[i] = 0.5 * (1.0 + x);
    rule.weights[i] = scale * mu0 * v0 * v0;
  }
  return rule;
}

QuadResult integrate_1d(const std::function<double(double)>& fn, std::span<const double> points,
                        const QuadConfig& cfg) {
  cfg.validate();
  if (points.size() < 2) throw DomainError("integrate_1d: need at least two points");
  auto f = [&](double t) -> detail::Vec<1> { return {fn(t)}; };
  detail::VecTolerance<1> tol{cfg.abs_tol, cfg.rel_tol, {1.0}, cfg.max_depth, cfg.max_intervals};
  auto r = detail::adaptive_integrate<1>(f, points, tol);
  if (!r.converged) throw NonConvergence("integrate_1d did not converge", r.value[0], r.error[0]);
  return QuadResult{r.value[0], r.error[0], r.evaluations};
}

QuadResult integrate_1d(const std::function<double(double)>& fn, double a, double b, const QuadConfig& cfg) {
  if (!(b > a)) {
    if (a == b) return {};
    throw DomainError("integrate_1d: require a <= b");
  }
  const double pts[2] = {a, b};
  return integrate_1d(fn, std::span<const double>(pts, 2), cfg);
}

double integrate_beta_weighted(const std::function<double(double)>& g, double alpha, const QuadConfig& cfg) {
  if (!(alpha > -1.0)) throw DomainError("integrate_beta_weighted: alpha must exceed -1");
  const double e = 1.0 / (1.0 + alpha);
  auto h = [&](double u) { return g(1.0 - std::pow(u, e)) * e; };
  return integrate_1d(h, 0.0, 1.0, cfg).value;
}

double integrate_beta_weighted_gj(const std::function<double(double)>& g, double alpha, int n) {
  if (!(alpha > -1.0)) throw DomainError("integrate_beta_weighted_gj: alpha must exceed -1");
  const GaussRule rule = gauss_jacobi_unit(n, alpha, 0.0);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rule.weights[i] * g(rule.nodes[i]);
  return sum;
}

QuadResult integrate_jacobi_weighted(const std::function<double(double)>& g, double left, double right,
                                     double feature_scale, const QuadConfig& cfg) {
  if (!(left > -1.0) || !(right > -1.0)) throw DomainError("integrate_jacobi_weighted: exponents must exceed -1");
  constexpr double kSplit = 0.5;

  // [0, 1/2]: v = t^(left+1), t^left dt = dv / (left+1).
  const double el = 1.0 / (left + 1.0);
  auto lower = [&](double v) {
    const double t = std::pow(v, el);
    return g(t) * std::pow(1.0 - t, right) * el;
  };
  std::vector<double> pts{0.0};
  if (feature_scale > 0.0 && feature_scale < kSplit) {
    for (double c = feature_scale * 1e-2; c < kSplit; c *= 4.0) {
      const double v = std::pow(c, left + 1.0);
      if (v > pts.back()) pts.push_back(v);
    }
  }
  pts.push_back(std::pow(kSplit, left + 1.0));
  const QuadResult lo = integrate_1d(lower, pts, cfg);

  // [1/2, 1]: u = (1-t)^(right+1).
  const double er = 1.0 / (right + 1.0);
  auto upper = [&](double u) {
    const double t = 1.0 - std::pow(u, er);
    return g(t) * std::pow(t, left) * er;
  };
  const QuadResult hi = integrate_1d(upper, 0.0, std::pow(1.0 - kSplit, right + 1.0), cfg);
  return QuadResult{lo.value + hi.value, lo.error + hi.error, lo.evaluations + hi.evaluations};
}

}  // namespace equishrink
