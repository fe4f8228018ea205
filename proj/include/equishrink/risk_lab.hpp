#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "equishrink/core_model.hpp"
#include "equishrink/estimators.hpp"
#include "equishrink/posterior.hpp"
#include "equishrink/prior.hpp"
#include "equishrink/radial_density.hpp"

namespace equishrink {

struct RiskPoint {
  double lambda = 0.0;
  double risk = 0.0;
  double std_err = 0.0;
  std::int64_t n_reps = 0;  // accepted draws
  std::int64_t rejected = 0;  // draws dropped because a rule was singular there
  std::string estimator_id;
};

struct RiskCurve {
  std::vector<RiskPoint> points;
  std::string density_id;
  std::string estimator_id;
  std::uint64_t seed = 0;
};

struct McConfig {
  unsigned threads = 0;  // 0 = hardware concurrency
  std::size_t chunk = 4096;
};

/// Seed for chunk `chunk` of grid point `lambda_index`: three rounds of
/// splitmix64 over (root, lambda_index, chunk).
std::uint64_t stream_seed(std::uint64_t root, std::uint64_t lambda_index, std::uint64_t chunk);

/// Risk of each rule at one lambda from common draws, with theta = sqrt(lambda) e_1
/// and eta = 1. Chunks are evaluated in parallel and reduced in chunk order with
/// compensated summation, so results do not depend on the thread count.
/// `paired` holds the moments of loss_k - loss_0 for k >= 1 (paired[0] is
/// all zeros) as RiskPoints.
struct MultiRisk {
  std::vector<RiskPoint> risks;
  std::vector<RiskPoint> paired;
};
MultiRisk mc_risk_multi(std::span<const ShrinkageRule> rules, const RadialDensity& d, double lambda,
                        std::int64_t n_reps, std::uint64_t seed, std::uint64_t lambda_index = 0,
                        const McConfig& mc = {});

RiskPoint mc_risk(const ShrinkageRule& rule, const RadialDensity& d, double lambda, std::int64_t n_reps,
                  std::uint64_t seed, std::uint64_t lambda_index = 0, const McConfig& mc = {});

/// General (theta, eta) path: full p- and n-vectors are drawn and the rule is
/// applied through apply_shrinkage. Scalar code; used to check the aligned path.
RiskPoint mc_risk_general(const ShrinkageRule& rule, const RadialDensity& d, const LocationScale& loc,
                          std::int64_t n_reps, std::uint64_t seed, const McConfig& mc = {});

/// One RiskPoint per lambda; grid point j uses lambda_index j, so curves for
/// different rules with the same seed share their draws.
RiskCurve risk_curve(const ShrinkageRule& rule, const RadialDensity& d, std::span<const double> lambda_grid,
                     std::int64_t n_reps, std::uint64_t seed, const McConfig& mc = {});

enum class Verdict { ADominates, BDominates, Indistinguishable };
const char* to_string(Verdict v);

struct DominanceRow {
  double lambda;
  double risk_a;
  double risk_b;
  double difference;  // risk_a - risk_b from paired draws
  double std_err;     // of the paired difference
  Verdict verdict;    // 3 standard errors
};

struct DominanceReport {
  std::string rule_a;
  std::string rule_b;
  std::vector<DominanceRow> rows;
  /// risk_a <= risk_b + 3 SE at every lambda.
  bool a_not_worse() const;
};

DominanceReport compare_dominance(const ShrinkageRule& a, const ShrinkageRule& b, const RadialDensity& d,
                                  std::span<const double> lambda_grid, std::int64_t n_reps, std::uint64_t seed,
                                  const McConfig& mc = {});

struct MinimaxReport {
  RiskCurve curve;
  double bound = 0.0;  // p
  bool passed = false;  // risk <= p + 3 SE everywhere
  double worst_margin = 0.0;  // max over lambda of (risk - p) / SE
};

MinimaxReport minimax_check(const ShrinkageRule& rule, const RadialDensity& d, std::span<const double> lambda_grid,
                            std::int64_t n_reps, std::uint64_t seed, const McConfig& mc = {});

/// Bayes-equivariant risk
///   B(psi, pi) = p + c_n c_p \int_0^inf w^(p/2) psi(w) {psi(w) - 2 psi_pi(w)} M1(w) dw
/// for a proper prior (normalized internally). Posterior integrals are cached
/// by w so that several rules evaluated against one prior share nodes.
class BayesRiskEvaluator {
 public:
  BayesRiskEvaluator(RadialDensity density, PriorSpec prior, QuadConfig cfg = {});

  struct Result {
    double value;
    double error;
  };

  Result risk(const ShrinkageRule& rule);
  /// Same integral for an arbitrary psi.
  Result risk(const std::function<double(double)>& psi);
  /// psi_pi(w) from the cached posterior integrals.
  double bayes_psi(double w);
  const PriorSpec& prior() const noexcept { return prior_; }
  std::size_t cached_nodes() const noexcept { return nodes_.size(); }

 private:
  const PosteriorIntegrals& node(double w);

  RadialDensity density_;
  PriorSpec prior_;
  QuadConfig cfg_;
  PosteriorEngine engine_;
  std::map<double, PosteriorIntegrals> nodes_;
};

/// Monte Carlo counterpart: lambda ~ pi, then one draw at that lambda.
RiskPoint mc_bayes_risk(const ShrinkageRule& rule, const RadialDensity& d, const PriorSpec& prior,
                        std::int64_t n_reps, std::uint64_t seed, const McConfig& mc = {});

/// CSV: lambda,risk,std_err,n_reps,estimator (header line first).
void write_risk_csv(std::ostream& out, const std::vector<RiskCurve>& curves);

}  // namespace equishrink
