#pragma once

// Numerical evidence around the tapered-prior argument: properties of the
// h_i sequence, checks of the prior assumptions, and pointwise convergence of
// the tapered Bayes rules. Everything here is a finite-grid diagnostic.

#include <span>
#include <string>
#include <vector>

#include "equishrink/io.hpp"
#include "equishrink/posterior.hpp"
#include "equishrink/prior.hpp"
#include "equishrink/radial_density.hpp"

namespace equishrink::blyth {

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;  // the quantity that was compared
  double bound = 0.0;  // what it was compared against
  std::string detail;
};

bool all_passed(std::span<const Check> checks);

/// Properties of h_i: h_1(1) > 1/8, sup |h_i'| < 5, monotone in i and lambda,
/// h_i -> 1, the log-log derivative bound, and finite-difference agreement of
/// the closed-form derivative.
std::vector<Check> lemma_suite();

/// pi_i <= pi_{i+1} <= pi on a lambda grid for consecutive entries of
/// i_list, \int pi_i < inf for each i, and \int_0^1 pi_1 > 0.
std::vector<Check> prior_chain_checks(const PriorSpec& prior, std::span<const int> i_list);

/// Strawderman parameter region in which the prior assumptions hold:
/// -1 <= alpha + beta <= 0 with alpha > -1 (b > 0) or alpha > -1/2 (b = 0).
bool strawderman_assumptions_hold(double alpha, double beta, double b);
/// PriorSpec::strawderman after checking the region above (DomainError otherwise).
PriorSpec strawderman_verified(int p, double alpha, double beta, double b);

enum class TailClass { A31, A321, A322, Fails };
const char* to_string(TailClass c);

struct GridPoint {
  double lambda;
  double kappa;
};

struct AssumptionReport {
  std::string prior_id;

  bool a1 = false;                // kappa finite on the grid and consistent with finite differences
  double a1_max_fd_gap = 0.0;     // largest |kappa - kappa_fd|
  std::vector<GridPoint> a1_grid;

  bool a2 = false;
  double alpha_hat = 0.0;         // log-log slope of pi on [1e-8, 1e-7]
  double nu_at_origin = 0.0;      // pi(1e-8) / 1e-8^alpha_hat
  std::vector<GridPoint> a2_grid;  // kappa near 0; kappa - alpha_hat estimates lambda nu'/nu

  TailClass a3 = TailClass::Fails;
  double kappa_limit = 0.0;       // kappa(1e8), or an extrapolation when kappa still drifts
  double kappa_drift = 0.0;       // |kappa(1e8) - kappa(1e7)|
  double log_kappa_sup = 0.0;     // max over lambda >= 1e5 of log(lambda)|kappa|
  std::vector<GridPoint> a3_grid;  // lambda = 10^2 .. 10^8

  bool all() const { return a1 && a2 && a3 != TailClass::Fails; }
};

AssumptionReport assumption_report(const PriorSpec& prior);

struct ConvergenceRow {
  double w = 0.0;
  double psi_limit = 0.0;
  double limit_error = 0.0;
  std::vector<double> psi;        // per entry of i_list
  std::vector<double> deviation;  // |psi_i - psi_limit|
  std::vector<double> error;      // achieved_error(psi_i) + limit_error
  bool nonincreasing = false;
};

struct ConvergenceReport {
  std::string prior_id;
  std::string density_id;
  std::vector<int> i_list;
  std::vector<ConvergenceRow> rows;
  bool passed() const;
};

/// |psi_{pi_i}(w) - psi_pi(w)| on a (w, i) grid. A row passes when the
/// deviation never grows by more than twice the combined quadrature error.
ConvergenceReport psi_convergence_diagnostic(const PriorSpec& prior, const RadialDensity& density,
                                             std::span<const double> w_grid, std::span<const int> i_list,
                                             const QuadConfig& cfg = {}, unsigned threads = 0);

void write_json(io::JsonWriter& j, std::span<const Check> checks);
void write_json(io::JsonWriter& j, const AssumptionReport& r);
void write_json(io::JsonWriter& j, const ConvergenceReport& r);

}  // namespace equishrink::blyth
