#include "equishrink/blyth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "equishrink/error.hpp"
#include "equishrink/quadrature.hpp"
#include "parallel.hpp"

namespace equishrink::blyth {

namespace {

constexpr double kE = std::numbers::e;

std::vector<double> log_grid(double lo_exp, double hi_exp, int per_decade) {
  std::vector<double> g;
  const int n = static_cast<int>(std::lround((hi_exp - lo_exp) * per_decade));
  for (int k = 0; k <= n; ++k) g.push_back(std::pow(10.0, lo_exp + static_cast<double>(k) / per_decade));
  return g;
}

Check make(std::string name, bool passed, double value, double bound, std::string detail = {}) {
  return Check{std::move(name), passed, value, bound, std::move(detail)};
}

std::string where(int i, double lambda) {
  std::ostringstream os;
  os << "i=" << i << " lambda=" << io::format_double(lambda);
  return os.str();
}

const std::vector<int> kLemmaIndices = {1, 2, 3, 5, 10, 30, 100, 1000, 10000, 1000000};

std::vector<double> lemma_lambdas() {
  std::vector<double> g{0.0};
  for (double l : log_grid(-6.0, 8.0, 4)) g.push_back(l);
  return g;
}

double kappa_fd(const PriorSpec& prior, double lambda) {
  const double e = 1e-4;
  return (std::log(prior.value(lambda * std::exp(e))) - std::log(prior.value(lambda * std::exp(-e)))) / (2.0 * e);
}

}  // namespace

bool all_passed(std::span<const Check> checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::vector<Check> lemma_suite() {
  std::vector<Check> out;
  const std::vector<double> lambdas = lemma_lambdas();

  {
    const double v = BlythSequence(1).value(1.0);
    out.push_back(make("h1_at_1_exceeds_one_eighth", v > 0.125, v, 0.125));
  }

  {
    double sup = 0.0;
    std::string at;
    for (int i : kLemmaIndices) {
      const BlythSequence h(i);
      for (double l : lambdas) {
        const double d = std::abs(h.derivative(l));
        if (d > sup) {
          sup = d;
          at = where(i, l);
        }
      }
    }
    out.push_back(make("sup_abs_derivative_below_5", sup < 5.0, sup, 5.0, at));
  }

  {
    // Range, decreasing in lambda, increasing in i.
    bool range_ok = true, lambda_ok = true, index_ok = true;
    std::string first_bad;
    double worst = 0.0;
    for (std::size_t a = 0; a < kLemmaIndices.size(); ++a) {
      const BlythSequence h(kLemmaIndices[a]);
      for (std::size_t k = 0; k < lambdas.size(); ++k) {
        const double v = h.value(lambdas[k]);
        if (!(v >= 0.0 && v <= 1.0)) {
          range_ok = false;
          if (first_bad.empty()) first_bad = where(kLemmaIndices[a], lambdas[k]);
        }
        if (k > 0) {
          const double step = v - h.value(lambdas[k - 1]);
          worst = std::max(worst, step);
          if (step > 0.0) lambda_ok = false;
        }
        if (a > 0 && v < BlythSequence(kLemmaIndices[a - 1]).value(lambdas[k])) index_ok = false;
      }
    }
    out.push_back(make("h_in_unit_interval", range_ok, 0.0, 0.0, first_bad));
    out.push_back(make("h_nonincreasing_in_lambda", lambda_ok, worst, 0.0));
    out.push_back(make("h_nondecreasing_in_i", index_ok, 0.0, 0.0));
  }

  {
    // h_i(7) -> 1: the gap loglog(7+e)/loglog(7+e+i) shrinks strictly and is
    // small once i is astronomically large (the approach is log-log slow).
    bool strict = true;
    double prev = 1.0;
    double gap = 1.0;
    for (double i = 1.0; i <= 1e300; i *= 1e10) {
      gap = loglog_shifted(7.0) / loglog_shifted(7.0 + i);
      if (!(gap < prev)) strict = false;
      prev = gap;
    }
    bool indices = true;
    double last = 0.0;
    for (int i : {1, 10, 100, 1000}) {
      const double v = BlythSequence(i).value(7.0);
      if (!(v > last)) indices = false;
      last = v;
    }
    out.push_back(make("h_tends_to_one", strict && indices && gap < 0.15, 1.0 - gap, 0.85,
                       "h at lambda=7 for i up to 1e300"));
  }

  {
    double worst_ratio = 0.0;
    std::string at;
    for (int i : kLemmaIndices) {
      const BlythSequence h(i);
      for (double l : lambdas) {
        const double x = l + kE;
        const double bound = 2.0 / (x * std::log(x) * loglog_shifted(l + 1.0));
        const double ratio = std::abs(h.derivative(l)) / bound;
        if (ratio > worst_ratio) {
          worst_ratio = ratio;
          at = where(i, l);
        }
      }
    }
    out.push_back(make("derivative_loglog_bound", worst_ratio <= 1.0, worst_ratio, 1.0, at));
  }

  {
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> pick_i(1, 1000);
    std::uniform_real_distribution<double> pick_log(-3.0, 6.0);
    double worst = 0.0;
    std::string at;
    for (int k = 0; k < 20; ++k) {
      const int i = pick_i(rng);
      const double l = std::pow(10.0, pick_log(rng));
      const BlythSequence h(i);
      const double step = 1e-4 * std::max(l, 1e-2);
      const double fd = (h.value(l + step) - h.value(l - step)) / (2.0 * step);
      const double rel = std::abs(fd - h.derivative(l)) / std::abs(h.derivative(l));
      if (rel > worst) {
        worst = rel;
        at = where(i, l);
      }
    }
    out.push_back(make("derivative_matches_finite_difference", worst < 1e-6, worst, 1e-6, at));
  }
  return out;
}

std::vector<Check> prior_chain_checks(const PriorSpec& prior, std::span<const int> i_list) {
  if (i_list.empty()) throw DomainError("chain checks: empty index list");
  std::vector<int> idx(i_list.begin(), i_list.end());
  std::sort(idx.begin(), idx.end());
  if (idx.front() < 1) throw DomainError("chain checks: indices must be positive");

  std::vector<Check> out;
  const std::vector<double> lambdas = log_grid(-6.0, 8.0, 2);
  {
    bool ok = true;
    double worst = 0.0;
    std::string at;
    for (double l : lambdas) {
      const double base = prior.value(l);
      double prev = 0.0;
      for (std::size_t k = 0; k <= idx.size(); ++k) {
        const double v = k < idx.size() ? prior.tapered(idx[k]).value(l) : base;
        const double excess = (prev - v) / base;
        if (excess > 1e-14) {
          ok = false;
          if (excess > worst) {
            worst = excess;
            at = where(k < idx.size() ? idx[k] : 0, l);
          }
        }
        prev = v;
      }
    }
    out.push_back(make("tapered_priors_increase_to_prior", ok, worst, 0.0, at));
  }
  for (int i : idx) {
    const double mass = prior.tapered(i).total_mass();
    out.push_back(make("tapered_mass_finite_i" + std::to_string(i), std::isfinite(mass) && mass > 0.0, mass,
                       std::numeric_limits<double>::infinity()));
  }
  {
    const PriorSpec p1 = prior.tapered(1);
    QuadConfig cfg;
    cfg.rel_tol = 1e-8;
    const QuadResult r = integrate_1d([&p1](double l) { return p1.value(l); }, 0.0, 1.0, cfg);
    out.push_back(make("tapered_mass_on_unit_interval_positive", r.value > 0.0, r.value, 0.0));
  }
  return out;
}

bool strawderman_assumptions_hold(double alpha, double beta, double b) {
  const double s = alpha + beta;
  if (!(s >= -1.0 && s <= 0.0)) return false;
  if (b > 0.0) return alpha > -1.0;
  return b == 0.0 && alpha > -0.5;
}

PriorSpec strawderman_verified(int p, double alpha, double beta, double b) {
  if (!strawderman_assumptions_hold(alpha, beta, b)) {
    throw DomainError("strawderman: parameters outside the region where the prior assumptions hold");
  }
  return PriorSpec::strawderman(p, alpha, beta, b);
}

const char* to_string(TailClass c) {
  switch (c) {
    case TailClass::A31:
      return "A3.1";
    case TailClass::A321:
      return "A3.2.1";
    case TailClass::A322:
      return "A3.2.2";
    case TailClass::Fails:
      return "fails";
  }
  return "";
}

AssumptionReport assumption_report(const PriorSpec& prior) {
  AssumptionReport r;
  r.prior_id = prior.id();

  // A.1
  r.a1 = true;
  for (double l : log_grid(-6.0, 6.0, 1)) {
    const double k = prior.kappa(l);
    r.a1_grid.push_back({l, k});
    if (!std::isfinite(k)) {
      r.a1 = false;
      continue;
    }
    const double gap = std::abs(k - kappa_fd(prior, l));
    r.a1_max_fd_gap = std::max(r.a1_max_fd_gap, gap);
    if (!(gap <= 1e-5 * (1.0 + std::abs(k)))) r.a1 = false;
  }

  // A.2: pi = lambda^alpha nu with nu(0) in (0, inf) and lambda nu' -> 0.
  const double lo = 1e-8, hi = 1e-7;
  const double pi_lo = prior.value(lo), pi_hi = prior.value(hi);
  if (pi_lo > 0.0 && pi_hi > 0.0 && std::isfinite(pi_lo) && std::isfinite(pi_hi)) {
    r.alpha_hat = std::log(pi_hi / pi_lo) / std::log(hi / lo);
    r.nu_at_origin = pi_lo / std::pow(lo, r.alpha_hat);
    for (double l : {1e-2, 1e-4, 1e-6, 1e-8}) r.a2_grid.push_back({l, prior.kappa(l)});
    const double gap_far = std::abs(r.a2_grid[1].kappa - r.alpha_hat);
    const double gap_near = std::abs(r.a2_grid[3].kappa - r.alpha_hat);
    r.a2 = r.alpha_hat > -0.5 && std::isfinite(r.nu_at_origin) && r.nu_at_origin > 0.0 && gap_near < 0.02 &&
           gap_near <= gap_far + 1e-6;
  } else {
    r.alpha_hat = std::numeric_limits<double>::quiet_NaN();
    r.nu_at_origin = std::numeric_limits<double>::quiet_NaN();
  }

  // A.3
  for (int k = 2; k <= 8; ++k) {
    const double l = std::pow(10.0, k);
    r.a3_grid.push_back({l, prior.kappa(l)});
  }
  const auto& g = r.a3_grid;
  r.kappa_limit = g.back().kappa;
  r.kappa_drift = std::abs(g.back().kappa - g[g.size() - 2].kappa);
  r.log_kappa_sup = 0.0;
  bool tail_finite = true;
  for (const auto& pt : g) {
    if (!std::isfinite(pt.kappa)) tail_finite = false;
    if (pt.lambda >= 1e5) r.log_kappa_sup = std::max(r.log_kappa_sup, std::log(pt.lambda) * std::abs(pt.kappa));
  }
  // A drifting kappa is extrapolated linearly in 1 / log(lambda) from the
  // last two grid points, which covers the usual log-type corrections.
  constexpr double settle_tol = 1e-3;
  constexpr double limit_tol = 0.02;
  if (r.kappa_drift > settle_tol) {
    const double u1 = 1.0 / std::log(g[g.size() - 2].lambda), u2 = 1.0 / std::log(g.back().lambda);
    const double k1 = g[g.size() - 2].kappa, k2 = g.back().kappa;
    r.kappa_limit = k2 - u2 * (k2 - k1) / (u2 - u1);
  }
  if (!tail_finite) {
    r.a3 = TailClass::Fails;
  } else if (std::abs(r.kappa_limit) <= limit_tol) {
    bool negative_increasing = true;
    for (std::size_t k = g.size() - 4; k < g.size(); ++k) {
      if (g[k].kappa >= 0.0) negative_increasing = false;
      if (k + 1 < g.size() && !(g[k + 1].kappa > g[k].kappa)) negative_increasing = false;
    }
    if (negative_increasing) {
      r.a3 = TailClass::A321;
    } else if (r.log_kappa_sup < 1.0) {
      r.a3 = TailClass::A322;
    } else {
      r.a3 = TailClass::Fails;
    }
  } else if (r.kappa_limit >= -1.0 - limit_tol && r.kappa_limit < 0.0) {
    r.a3 = TailClass::A31;
  } else {
    r.a3 = TailClass::Fails;
  }
  return r;
}

bool ConvergenceReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const ConvergenceRow& r) { return r.nonincreasing; });
}

ConvergenceReport psi_convergence_diagnostic(const PriorSpec& prior, const RadialDensity& density,
                                             std::span<const double> w_grid, std::span<const int> i_list,
                                             const QuadConfig& cfg, unsigned threads) {
  if (w_grid.empty() || i_list.empty()) throw DomainError("convergence diagnostic: empty grid");
  for (double w : w_grid) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("convergence diagnostic: w must be finite and >= 0");
  }
  for (int i : i_list) {
    if (i < 1) throw DomainError("convergence diagnostic: indices must be positive");
  }
  ConvergenceReport rep;
  rep.prior_id = prior.id();
  rep.density_id = density.id();
  rep.i_list.assign(i_list.begin(), i_list.end());

  // Engine 0 is the untapered prior; engine k + 1 uses h_{i_list[k]}.
  const int n_eng = static_cast<int>(i_list.size()) + 1;
  std::vector<std::unique_ptr<PosteriorEngine>> engines(n_eng);
  detail::parallel_for(n_eng, threads, [&](int e) {
    PriorSpec pr = e == 0 ? prior : prior.tapered(i_list[e - 1]);
    engines[e] = std::make_unique<PosteriorEngine>(density, std::move(pr), cfg);
  });
  const int nw = static_cast<int>(w_grid.size());
  std::vector<PosteriorIntegrals> res(static_cast<std::size_t>(n_eng) * nw);
  detail::parallel_for(n_eng * nw, threads, [&](int t) { res[t] = engines[t / nw]->integrals(w_grid[t % nw]); });

  for (int j = 0; j < nw; ++j) {
    ConvergenceRow row;
    row.w = w_grid[j];
    row.psi_limit = res[j].psi;
    row.limit_error = res[j].achieved_error;
    for (int e = 1; e < n_eng; ++e) {
      const PosteriorIntegrals& pi = res[static_cast<std::size_t>(e) * nw + j];
      row.psi.push_back(pi.psi);
      row.deviation.push_back(std::abs(pi.psi - row.psi_limit));
      row.error.push_back(pi.achieved_error + row.limit_error);
    }
    row.nonincreasing = true;
    for (std::size_t k = 1; k < row.deviation.size(); ++k) {
      if (row.deviation[k] > row.deviation[k - 1] + 2.0 * (row.error[k] + row.error[k - 1])) row.nonincreasing = false;
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

void write_json(io::JsonWriter& j, std::span<const Check> checks) {
  j.begin_array();
  for (const auto& c : checks) {
    j.begin_object();
    j.field("name", c.name).field("passed", c.passed).field("value", c.value).field("bound", c.bound);
    j.field("detail", c.detail);
    j.end_object();
  }
  j.end_array();
}

namespace {
void write_grid(io::JsonWriter& j, const std::vector<GridPoint>& g) {
  j.begin_array();
  for (const auto& pt : g) {
    j.begin_object();
    j.field("lambda", pt.lambda).field("kappa", pt.kappa);
    j.end_object();
  }
  j.end_array();
}
}  // namespace

void write_json(io::JsonWriter& j, const AssumptionReport& r) {
  j.begin_object();
  j.field("prior", r.prior_id);
  j.key("A1").begin_object();
  j.field("passed", r.a1).field("max_fd_gap", r.a1_max_fd_gap);
  j.key("grid");
  write_grid(j, r.a1_grid);
  j.end_object();
  j.key("A2").begin_object();
  j.field("passed", r.a2).field("alpha_hat", r.alpha_hat).field("nu_at_origin", r.nu_at_origin);
  j.key("grid");
  write_grid(j, r.a2_grid);
  j.end_object();
  j.key("A3").begin_object();
  j.field("classification", to_string(r.a3)).field("kappa_limit", r.kappa_limit);
  j.field("kappa_drift", r.kappa_drift).field("log_kappa_sup", r.log_kappa_sup);
  j.key("grid");
  write_grid(j, r.a3_grid);
  j.end_object();
  j.field("all_passed", r.all());
  j.end_object();
}

void write_json(io::JsonWriter& j, const ConvergenceReport& r) {
  j.begin_object();
  j.field("prior", r.prior_id).field("density", r.density_id);
  j.key("i").begin_array();
  for (int i : r.i_list) j.value(i);
  j.end_array();
  j.key("rows").begin_array();
  for (const auto& row : r.rows) {
    j.begin_object();
    j.field("w", row.w).field("psi_limit", row.psi_limit).field("limit_error", row.limit_error);
    j.field("psi", row.psi).field("deviation", row.deviation).field("error", row.error);
    j.field("nonincreasing", row.nonincreasing);
    j.end_object();
  }
  j.end_array();
  j.field("passed", r.passed());
  j.end_object();
}

}  // namespace equishrink::blyth
