#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "equishrink/core_model.hpp"
#include "equishrink/posterior.hpp"
#include "equishrink/prior.hpp"
#include "equishrink/radial_density.hpp"

namespace equishrink {

/// A member of the class {1 - psi(W)} x.
///
/// psi_batch() is the fast path used by the Monte Carlo code; for PsiAlpha it
/// reads a dense spline table (built on first use) and for NumericBayes a
/// monotone cubic cache on (log w, log psi) built by the constructor.
/// psi() is direct quadrature for PsiAlpha but also reads the cache for
/// NumericBayes; psi_direct() bypasses it.
class ShrinkageRule {
 public:
  enum class Kind { Natural, JamesStein, PsiAlpha, SimpleBayes, NumericBayes, Custom };

  static ShrinkageRule natural(ProblemDim dims);
  static ShrinkageRule james_stein(ProblemDim dims);
  /// -1/2 < alpha <= 0.
  static ShrinkageRule psi_alpha(ProblemDim dims, double alpha);
  /// psi(w) = a / (w + (a + 1)(b + 1)); a > 0, b >= 0.
  static ShrinkageRule simple_bayes(ProblemDim dims, double a, double b);
  /// Bayes-equivariant rule for (density, prior) through the posterior integrals.
  /// The cache is built with up to `threads` workers (0 = hardware concurrency).
  static ShrinkageRule numeric_bayes(RadialDensity density, PriorSpec prior, QuadConfig cfg = {},
                                     unsigned threads = 0);
  /// Arbitrary psi; used for perturbation studies. psi must be finite on [0, inf).
  static ShrinkageRule custom(ProblemDim dims, std::function<double(double)> psi, std::string label);

  Kind kind() const noexcept { return kind_; }
  const ProblemDim& dims() const noexcept { return dims_; }
  double alpha() const noexcept { return alpha_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  std::string id() const;

  double psi(double w) const;
  /// NumericBayes only: bypass the cache (throws for the other kinds).
  PosteriorIntegrals psi_direct(double w) const;
  /// out[i] = psi(w[i]) through the fast path. Throws like psi().
  void psi_batch(std::span<const double> w, std::span<double> out) const;
  /// Largest relative cache error seen at held-out points (NumericBayes,
  /// PsiAlpha); 0 otherwise. For PsiAlpha this builds the table.
  double cache_error() const;

 private:
  struct Cache;
  ShrinkageRule(Kind kind, ProblemDim dims) : kind_(kind), dims_(dims) {}
  double psi_fast(double w) const;
  void fill_alpha_table() const;

  Kind kind_;
  ProblemDim dims_;
  double alpha_ = 0.0;
  double a_ = 0.0;
  double b_ = 0.0;
  std::string label_;
  std::shared_ptr<const std::function<double(double)>> custom_;
  std::shared_ptr<const PosteriorEngine> engine_;
  std::shared_ptr<Cache> cache_;
};

/// psi_alpha(w) = I_1 / I_0 with I_k = \int_0^1 t^(p/2-alpha-2+k) (1-t)^alpha (1+wt)^(-(p+n)/2-1) dt.
/// At w = 0 the Beta closed form (p/2 - alpha - 1) / (p/2) is returned.
double psi_alpha_value(ProblemDim dims, double alpha, double w, const QuadConfig& cfg = {});

/// The alpha = 0 ratio evaluated with plain adaptive quadrature on [0, 1]
/// (no endpoint substitution); an independent path for psi_alpha(0).
double psi_zero_plain(ProblemDim dims, double w, const QuadConfig& cfg = {});

/// {1 - psi(W)} x. Throws DegenerateScale for s = 0 and SingularityError for
/// James-Stein at x = 0.
Eigen::VectorXd apply_shrinkage(const ShrinkageRule& rule, const Observation& obs);

/// a = {(p+n)/2 - alpha - 1} / (alpha + 1) and its inverse.
double alpha_to_a(double alpha, ProblemDim dims);
double a_to_alpha(double a, ProblemDim dims);

/// ((p-2)/(n+2), 2(p-2)/(n+2)).
std::pair<double, double> minimax_a_range(ProblemDim dims);
/// -(5 + 2/(p-2) + 3p/(n+2))^-1.
double minimax_alpha_lower_bound(ProblemDim dims);

/// Text grammars.
///   density: gaussian | gt:A[,B]
///   prior:   power:ALPHA | strawderman:ALPHA,BETA,B
///   rule:    natural | js | psi-alpha:ALPHA | simple-bayes:A,B | bayes:PRIOR (or bayes:prior=PRIOR)
/// Malformed text throws ParseError; well-formed but invalid values throw DomainError.
RadialDensity parse_density(const std::string& spec, ProblemDim dims);
PriorSpec parse_prior(const std::string& spec, int p);
ShrinkageRule parse_rule(const std::string& spec, const RadialDensity& density, unsigned threads = 0);

}  // namespace equishrink
