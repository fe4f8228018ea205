// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.
// Every Monte Carlo seed below is fixed and is not to be tuned.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "equishrink/blyth.hpp"
#include "equishrink/error.hpp"
#include "equishrink/estimators.hpp"
#include "equishrink/posterior.hpp"
#include "equishrink/regression.hpp"
#include "equishrink/risk_lab.hpp"

using namespace equishrink;

namespace {

constexpr std::uint64_t kSeed = 20261015;
constexpr std::int64_t kReps = 200000;
const ProblemDim kDims(5, 10);
const std::vector<double> kGrid{0.0, 1.0, 5.0, 25.0, 100.0};

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<RadialDensity> densities() {
  return {RadialDensity::gaussian(kDims), RadialDensity::generalized_t(kDims, 8.0)};
}

Outcome natural_calibration() {
  const auto nat = ShrinkageRule::natural(kDims);
  double worst = 0.0;
  for (const auto& d : {RadialDensity::gaussian(kDims), RadialDensity::generalized_t(kDims, 8.0, 6.0)}) {
    const std::vector<double> grid{0.0, 1.0, 10.0, 100.0};
    const RiskCurve c = risk_curve(nat, d, grid, kReps, kSeed);
    for (const auto& pt : c.points) worst = std::max(worst, std::abs(pt.risk - 5.0) / pt.std_err);
  }
  return {worst <= 4.0, fmt("max |risk - 5| / SE = %.3f", worst)};
}

Outcome james_stein_oracle() {
  const double exact = 5.0 - 10.0 * 3.0 / 12.0;
  const RiskPoint r = mc_risk(ShrinkageRule::james_stein(kDims), RadialDensity::gaussian(kDims), 0.0, kReps, kSeed);
  const double z = std::abs(r.risk - exact) / r.std_err;
  return {z <= 4.0, fmt("risk %.5f vs %.1f, %.2f SE", r.risk, exact, z)};
}

// Shared draws for the dominance and minimax criteria: psi_0, JS and the
// simple Bayes rule at a = (p-2)/(n+2), b = 0, on common random numbers.
struct GridRun {
  std::vector<std::vector<MultiRisk>> by_density;  // [density][lambda]
};

const GridRun& grid_run() {
  static const GridRun run = [] {
    GridRun g;
    const std::vector<ShrinkageRule> rules{ShrinkageRule::psi_alpha(kDims, 0.0), ShrinkageRule::james_stein(kDims),
                                           ShrinkageRule::simple_bayes(kDims, 3.0 / 12.0, 0.0)};
    for (const auto& d : densities()) {
      auto& row = g.by_density.emplace_back();
      for (std::size_t j = 0; j < kGrid.size(); ++j) row.push_back(mc_risk_multi(rules, d, kGrid[j], kReps, kSeed, j));
    }
    return g;
  }();
  return run;
}

Outcome dominance() {
  double worst = -1e300;
  double at = 0.0;
  for (const auto& row : grid_run().by_density) {
    for (std::size_t j = 0; j < kGrid.size(); ++j) {
      const RiskPoint& js_minus_psi0 = row[j].paired[1];
      const double z = -js_minus_psi0.risk / js_minus_psi0.std_err;
      if (z > worst) worst = z, at = kGrid[j];
    }
  }
  return {worst <= 3.0, fmt("max (risk_psi0 - risk_js) / SE = %.3f at lambda %g", worst, at)};
}

Outcome minimaxity() {
  double worst = -1e300;
  for (const auto& row : grid_run().by_density)
    for (const auto& m : row)
      for (std::size_t k : {0u, 2u}) worst = std::max(worst, (m.risks[k].risk - 5.0) / m.risks[k].std_err);
  return {worst <= 3.0, fmt("max (risk - p) / SE = %.3f", worst)};
}

Outcome quadrature_oracle() {
  double gauss_err = 0.0, gt_err = 0.0, sb_err = 0.0;
  for (double alpha : {0.0, -0.2, -0.4}) {
    // Direct posterior quadrature; the rule's interpolation cache is not under test here.
    const PosteriorEngine g(RadialDensity::gaussian(kDims), PriorSpec::power(5, alpha));
    const PosteriorEngine t(RadialDensity::generalized_t(kDims, 8.0), PriorSpec::power(5, alpha));
    for (double w : {0.5, 2.0, 10.0}) {
      const double ref = psi_alpha_value(kDims, alpha, w);
      gauss_err = std::max(gauss_err, std::abs(g.psi(w) - ref) / ref);
      gt_err = std::max(gt_err, std::abs(t.psi(w) - ref) / ref);
    }
  }
  const double alpha = 0.5;
  const double a = (7.5 - alpha - 1.0) / (alpha + 1.0);
  for (double b : {0.0, 1.0}) {
    const PosteriorEngine r(RadialDensity::gaussian(kDims), PriorSpec::strawderman(5, alpha, -5.0, b));
    for (double w : {0.5, 2.0, 10.0}) {
      const double ref = a / (w + (a + 1.0) * (b + 1.0));
      sb_err = std::max(sb_err, std::abs(r.psi(w) - ref) / ref);
    }
  }
  return {gauss_err <= 1e-5 && gt_err <= 1e-4 && sb_err <= 1e-5,
          fmt("rel err gaussian %.2e, gt %.2e, simple Bayes %.2e", gauss_err, gt_err, sb_err)};
}

Outcome anchors() {
  double origin = 0.0;
  for (double alpha : {0.0, -0.1, -0.2, -0.3, -0.4, -0.49}) {
    const double ref = (2.5 - alpha - 1.0) / 2.5;
    origin = std::max(origin, std::abs(ShrinkageRule::psi_alpha(kDims, alpha).psi(0.0) - ref));
    origin = std::max(origin, std::abs(psi_alpha_value(kDims, alpha, 0.0) - ref));
  }
  const double far = 1e4 * ShrinkageRule::psi_alpha(kDims, 0.0).psi(1e4);
  const double rel = std::abs(far - 0.25) / 0.25;
  return {origin <= 1e-9 && rel <= 0.01, fmt("|psi(0) - anchor| = %.2e, w psi_0(w) at 1e4 off by %.2e relative", origin,
                                             rel)};
}

Outcome lemma_suite_check() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto checks = blyth::lemma_suite();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string failed;
  for (const auto& c : checks)
    if (!c.passed) failed += " " + c.name;
  const bool ok = blyth::all_passed(checks) && secs < 1.0;
  return {ok, std::to_string(checks.size()) + " checks in " + fmt("%.3f s", secs) +
                  (failed.empty() ? "" : ", failed:" + failed)};
}

Outcome prior_asymptotics() {
  double worst = 0.0;
  for (auto [a, b, bb] : {std::tuple{0.5, -1.5, 0.0}, std::tuple{-0.3, 0.1, 1.0}, std::tuple{0.0, -0.5, 0.5}})
    worst = std::max(worst, std::abs(PriorSpec::strawderman(5, a, b, bb).kappa(1e6) - (a + b)));
  return {worst < 0.02, fmt("max |kappa(1e6) - (alpha + beta)| = %.4f", worst)};
}

Eigen::MatrixXd random_orthogonal(int p, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = z(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ();
}

Outcome equivariance() {
  struct Family {
    ProblemDim dims;
    std::vector<ShrinkageRule> rules;
  };
  std::vector<Family> fams;
  for (auto [p, n] : {std::pair{3, 2}, std::pair{5, 10}, std::pair{8, 4}}) {
    const ProblemDim d(p, n);
    fams.push_back({d,
                    {ShrinkageRule::natural(d), ShrinkageRule::james_stein(d), ShrinkageRule::psi_alpha(d, 0.0),
                     ShrinkageRule::psi_alpha(d, -0.3), ShrinkageRule::simple_bayes(d, 0.4, 0.5),
                     ShrinkageRule::numeric_bayes(RadialDensity::generalized_t(d, 8.0), PriorSpec::power(p, -0.1)),
                     ShrinkageRule::numeric_bayes(RadialDensity::gaussian(d), PriorSpec::strawderman(p, 0.5, -1.5, 1.0))}});
  }
  std::mt19937_64 rng(kSeed);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> log_gamma(-4.0, 4.0), log_scale(-3.0, 3.0);
  double worst = 0.0;
  int cases = 0;
  for (int i = 0; i < 1000; ++i) {
    const Family& f = fams[i % fams.size()];
    Eigen::VectorXd x(f.dims.p), u(f.dims.n);
    const double sx = std::exp(log_scale(rng));
    for (auto& v : x) v = sx * z(rng);
    for (auto& v : u) v = z(rng);
    const Observation obs(x, u);
    const double gamma = (i % 2 ? -1.0 : 1.0) * std::exp(log_gamma(rng));
    const Eigen::MatrixXd g = random_orthogonal(f.dims.p, rng);
    const Observation moved = group_act(obs, std::abs(gamma), g);
    for (const auto& r : f.rules) {
      const Eigen::VectorXd lhs = apply_shrinkage(r, moved);
      const Eigen::VectorXd rhs = std::abs(gamma) * (g * apply_shrinkage(r, obs));
      worst = std::max(worst, (lhs - rhs).norm() / rhs.norm());
      ++cases;
    }
  }
  return {worst <= 1e-12, fmt("%g rule evaluations, max relative gap %.2e", cases, worst)};
}

RegressionData make_dataset(int m, int p, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  RegressionData d;
  d.z.resize(m, p);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < p; ++j) d.z(i, j) = 2.0 * z(rng) + 0.5 * j;
  Eigen::VectorXd beta(p);
  for (auto& b : beta) b = z(rng);
  d.y = (d.z * beta).array() - 1.0;
  for (int i = 0; i < m; ++i) d.y[i] += 2.0 * z(rng);
  return d;
}

Outcome regression_round_trip() {
  std::mt19937_64 rng(kSeed);
  double pyth = 0.0, half = 0.0, wgap = 0.0;
  RegressionData last;
  for (int rep = 0; rep < 100; ++rep) {
    last = make_dataset(50, 5, rng);
    const CanonicalForm c = canonicalize(last);
    const double tss = (last.y.array() - last.y.mean()).matrix().squaredNorm();
    pyth = std::max(pyth, std::abs(tss - c.x.squaredNorm() - c.s) / tss);
    half = std::max(half, (c.x - c.half_gram * c.beta_hat).norm() / c.x.norm());
    wgap = std::max(wgap, std::abs(c.w - c.r_squared / (1.0 - c.r_squared)) / c.w);
  }
  Eigen::VectorXd beta(5);
  beta << 0.04, -0.03, 0.02, 0.0, 0.05;
  const double eta = 1.5;
  const ProblemDim dims(5, 44);
  double worst_z = 0.0;
  for (const auto& rule : {ShrinkageRule::natural(dims), ShrinkageRule::psi_alpha(dims, 0.0),
                           ShrinkageRule::simple_bayes(dims, 0.1, 0.0)}) {
    const RiskPoint reg = mc_predictive_risk(rule, last.z, beta, eta, 20000, kSeed);
    const RiskPoint can = mc_risk(rule, RadialDensity::gaussian(dims), reg.lambda, 20000, kSeed);
    worst_z = std::max(worst_z, std::abs(reg.risk - can.risk) / std::hypot(reg.std_err, can.std_err));
  }
  const bool ok = pyth <= 1e-10 && half <= 1e-10 && wgap <= 1e-10 && worst_z <= 4.0;
  return {ok, fmt("identity gaps %.1e / %.1e / %.1e, ", pyth, half, wgap) +
                  fmt("predictive vs canonical max %.2f SE", worst_z)};
}

Outcome bayes_optimality() {
  const auto d = RadialDensity::gaussian(kDims);
  BayesRiskEvaluator ev(d, PriorSpec::strawderman(5, 0.5, -5.0, 0.5));
  const double bayes = ev.risk([&ev](double w) { return ev.bayes_psi(w); }).value;
  const std::vector<std::function<double(double)>> bumps = {
      [](double) { return 1.0; },
      [](double w) { return std::exp(-std::pow(std::log(w), 2)); },
      [](double w) { return -std::exp(-std::pow(std::log(w) - 2.0, 2)); },
      [](double w) { return 1.0 / (1.0 + w); },
      [](double w) { return -w / (1.0 + w); },
  };
  double min_gain = 1e300;
  for (const auto& bump : bumps) {
    const double r = ev.risk([&](double w) { return ev.bayes_psi(w) + 0.05 * bump(w); }).value;
    min_gain = std::min(min_gain, r - bayes);
  }
  const std::vector<double> wg{0.0, 0.5, 2.0, 10.0, 100.0};
  const std::vector<int> il{1, 10, 100, 1000};
  const auto conv = blyth::psi_convergence_diagnostic(PriorSpec::power(5, 0.0), d, wg, il);
  // h_i -> 1 only at a log-log rate, so the deviations shrink slowly.
  double first_dev = 0.0, last_dev = 0.0;
  for (const auto& row : conv.rows) {
    first_dev = std::max(first_dev, row.deviation.front());
    last_dev = std::max(last_dev, row.deviation.back());
  }
  return {min_gain > 0.0 && conv.passed(),
          fmt("B(psi_pi) = %.6f, smallest perturbation penalty %.2e, ", bayes, min_gain) +
              fmt("max |psi_i - psi| %.3f at i = 1 down to %.3f at i = 1000", first_dev, last_dev)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"natural estimator calibration", natural_calibration},
      {"James-Stein risk at the origin", james_stein_oracle},
      {"psi_0 dominates James-Stein", dominance},
      {"minimaxity of psi_0 and simple Bayes", minimaxity},
      {"posterior quadrature vs closed forms", quadrature_oracle},
      {"psi_alpha anchor values", anchors},
      {"Blyth lemma suite", lemma_suite_check},
      {"Strawderman tail exponent", prior_asymptotics},
      {"equivariance", equivariance},
      {"regression round trip", regression_round_trip},
      {"Bayes risk minimization and convergence", bayes_optimality},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.passed) ++failures;
    std::printf("%s %2d %s: %s [%.1f s]\n", o.passed ? "PASS" : "FAIL", index, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
