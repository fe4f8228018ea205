#include "equishrink/risk_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "equishrink/error.hpp"
#include "equishrink/io.hpp"
#include "equishrink/kernels.hpp"
#include "parallel.hpp"

namespace equishrink {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Accumulator {
  detail::CompensatedSum sum;
  detail::CompensatedSum sum_sq;
  std::int64_t count = 0;

  void add(const kernels::Moments& m, std::int64_t n) {
    sum.add(m.sum);
    sum_sq.add(m.sum_sq);
    count += n;
  }

  RiskPoint finish(double lambda, std::string id, std::int64_t rejected) const {
    RiskPoint pt;
    pt.lambda = lambda;
    pt.n_reps = count;
    pt.rejected = rejected;
    pt.estimator_id = std::move(id);
    if (count == 0) return pt;
    const double n = static_cast<double>(count);
    const double mean = sum.value() / n;
    pt.risk = mean;
    if (count > 1) {
      const double var = std::max(0.0, (sum_sq.value() - n * mean * mean) / (n - 1.0));
      pt.std_err = std::sqrt(var / n);
    }
    return pt;
  }
};

struct ChunkStats {
  std::vector<kernels::Moments> loss;
  std::vector<kernels::Moments> diff;
  std::int64_t count = 0;
  std::int64_t rejected = 0;
};

bool singular_at_zero(std::span<const ShrinkageRule> rules) {
  return std::any_of(rules.begin(), rules.end(),
                     [](const ShrinkageRule& r) { return r.kind() == ShrinkageRule::Kind::JamesStein; });
}

void check_rules(std::span<const ShrinkageRule> rules, const RadialDensity& d) {
  if (rules.empty()) throw DomainError("risk: no rules given");
  for (const auto& r : rules) {
    if (r.dims() != d.dims()) throw DimensionMismatch("risk: rule " + r.id() + " and density differ in (p, n)");
  }
}

int chunk_count(std::int64_t n_reps, std::size_t chunk) {
  return static_cast<int>((n_reps + static_cast<std::int64_t>(chunk) - 1) / static_cast<std::int64_t>(chunk));
}

void require_reps(std::int64_t n_reps) {
  if (n_reps < 100) throw DomainError("risk: n_reps must be at least 100");
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t root, std::uint64_t lambda_index, std::uint64_t chunk) {
  return splitmix64(splitmix64(splitmix64(root) ^ lambda_index) ^ chunk);
}

MultiRisk mc_risk_multi(std::span<const ShrinkageRule> rules, const RadialDensity& d, double lambda,
                        std::int64_t n_reps, std::uint64_t seed, std::uint64_t lambda_index, const McConfig& mc) {
  check_rules(rules, d);
  require_reps(n_reps);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("risk: lambda must be finite and nonnegative");
  if (mc.chunk == 0) throw DomainError("risk: chunk size must be positive");

  const kernels::KernelTable& k = kernels::active_kernels();
  const int p = d.dims().p;
  const int n = d.dims().n;
  const double root_lambda = std::sqrt(lambda);
  const bool drop_zero = singular_at_zero(rules);
  const std::size_t nrules = rules.size();
  const int chunks = chunk_count(n_reps, mc.chunk);
  std::vector<ChunkStats> stats(chunks);

  detail::parallel_for(chunks, mc.threads, [&](int c) {
    const std::size_t m = static_cast<std::size_t>(
        std::min<std::int64_t>(static_cast<std::int64_t>(mc.chunk), n_reps - static_cast<std::int64_t>(c) * mc.chunk));
    Rng rng(stream_seed(seed, lambda_index, static_cast<std::uint64_t>(c)));
    std::normal_distribution<double> normal;
    std::gamma_distribution<double> chi_rest(0.5 * (p - 1), 2.0);
    std::gamma_distribution<double> chi_resid(0.5 * n, 2.0);

    std::vector<double> x1(m), r2(m), s(m), w(m), psi(m), tmp(m);
    std::vector<std::vector<double>> loss(nrules, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i) {
      const double g = d.draw_mixing_scale(rng);
      x1[i] = root_lambda + std::sqrt(g) * normal(rng);
      r2[i] = p > 1 ? g * chi_rest(rng) : 0.0;
      s[i] = g * chi_resid(rng);
    }
    k.statistic(x1.data(), r2.data(), s.data(), w.data(), m);

    ChunkStats& out = stats[c];
    std::size_t kept = m;
    if (drop_zero) {
      std::size_t j = 0;
      for (std::size_t i = 0; i < m; ++i) {
        if (w[i] > 0.0) {
          x1[j] = x1[i];
          r2[j] = r2[i];
          w[j] = w[i];
          ++j;
        }
      }
      kept = j;
      out.rejected = static_cast<std::int64_t>(m - kept);
    }
    out.count = static_cast<std::int64_t>(kept);
    out.loss.resize(nrules);
    out.diff.resize(nrules);
    for (std::size_t r = 0; r < nrules; ++r) {
      rules[r].psi_batch(std::span<const double>(w.data(), kept), std::span<double>(psi.data(), kept));
      k.aligned_loss(x1.data(), r2.data(), psi.data(), root_lambda, loss[r].data(), kept);
      out.loss[r] = k.moments(loss[r].data(), kept);
      if (r > 0) {
        k.subtract(loss[r].data(), loss[0].data(), tmp.data(), kept);
        out.diff[r] = k.moments(tmp.data(), kept);
      }
    }
  });

  std::vector<Accumulator> acc(nrules), dacc(nrules);
  std::int64_t rejected = 0;
  for (const auto& cs : stats) {
    rejected += cs.rejected;
    for (std::size_t r = 0; r < nrules; ++r) {
      acc[r].add(cs.loss[r], cs.count);
      dacc[r].add(cs.diff[r], cs.count);
    }
  }
  MultiRisk out;
  for (std::size_t r = 0; r < nrules; ++r) {
    out.risks.push_back(acc[r].finish(lambda, rules[r].id(), rejected));
    out.paired.push_back(dacc[r].finish(lambda, rules[r].id() + "-" + rules[0].id(), rejected));
  }
  return out;
}

RiskPoint mc_risk(const ShrinkageRule& rule, const RadialDensity& d, double lambda, std::int64_t n_reps,
                  std::uint64_t seed, std::uint64_t lambda_index, const McConfig& mc) {
  return mc_risk_multi(std::span<const ShrinkageRule>(&rule, 1), d, lambda, n_reps, seed, lambda_index, mc)
      .risks.front();
}

RiskPoint mc_risk_general(const ShrinkageRule& rule, const RadialDensity& d, const LocationScale& loc,
                          std::int64_t n_reps, std::uint64_t seed, const McConfig& mc) {
  check_rules(std::span<const ShrinkageRule>(&rule, 1), d);
  require_reps(n_reps);
  if (loc.theta().size() != d.dims().p) throw DimensionMismatch("risk: theta has the wrong length");
  const int chunks = chunk_count(n_reps, mc.chunk);
  struct Partial {
    std::vector<double> losses;
    std::int64_t rejected = 0;
  };
  std::vector<Partial> parts(chunks);
  // A different lambda_index space from the aligned path keeps the streams apart.
  constexpr std::uint64_t kGeneralStream = 0x6765'6e65'7261'6cULL;
  detail::parallel_for(chunks, mc.threads, [&](int c) {
    const std::int64_t m =
        std::min<std::int64_t>(static_cast<std::int64_t>(mc.chunk), n_reps - static_cast<std::int64_t>(c) * mc.chunk);
    Rng rng(stream_seed(seed, kGeneralStream, static_cast<std::uint64_t>(c)));
    Partial& part = parts[c];
    part.losses.reserve(static_cast<std::size_t>(m));
    for (std::int64_t i = 0; i < m; ++i) {
      const Observation obs = d.sample_observation(loc, rng);
      const double w = w_statistic(obs);
      if (w == 0.0 && rule.kind() == ShrinkageRule::Kind::JamesStein) {
        ++part.rejected;
        continue;
      }
      double psi;
      rule.psi_batch(std::span<const double>(&w, 1), std::span<double>(&psi, 1));
      part.losses.push_back(scaled_quadratic_loss((1.0 - psi) * obs.x(), loc.theta(), loc.eta()));
    }
  });
  const kernels::KernelTable& k = kernels::active_kernels();
  Accumulator acc;
  std::int64_t rejected = 0;
  for (const auto& part : parts) {
    acc.add(k.moments(part.losses.data(), part.losses.size()), static_cast<std::int64_t>(part.losses.size()));
    rejected += part.rejected;
  }
  return acc.finish(loc.lambda(), rule.id(), rejected);
}

RiskCurve risk_curve(const ShrinkageRule& rule, const RadialDensity& d, std::span<const double> lambda_grid,
                     std::int64_t n_reps, std::uint64_t seed, const McConfig& mc) {
  if (lambda_grid.empty()) throw DomainError("risk curve: lambda grid is empty");
  for (std::size_t j = 1; j < lambda_grid.size(); ++j) {
    if (!(lambda_grid[j] > lambda_grid[j - 1])) throw DomainError("risk curve: lambda grid must be increasing");
  }
  RiskCurve curve;
  curve.density_id = d.id();
  curve.estimator_id = rule.id();
  curve.seed = seed;
  for (std::size_t j = 0; j < lambda_grid.size(); ++j) {
    curve.points.push_back(mc_risk(rule, d, lambda_grid[j], n_reps, seed, j, mc));
  }
  return curve;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::ADominates:
      return "a_dominates";
    case Verdict::BDominates:
      return "b_dominates";
    case Verdict::Indistinguishable:
      return "indistinguishable";
  }
  return "";
}

bool DominanceReport::a_not_worse() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const DominanceRow& r) { return r.difference <= 3.0 * r.std_err; });
}

DominanceReport compare_dominance(const ShrinkageRule& a, const ShrinkageRule& b, const RadialDensity& d,
                                  std::span<const double> lambda_grid, std::int64_t n_reps, std::uint64_t seed,
                                  const McConfig& mc) {
  DominanceReport rep;
  rep.rule_a = a.id();
  rep.rule_b = b.id();
  const ShrinkageRule pair[] = {a, b};
  for (std::size_t j = 0; j < lambda_grid.size(); ++j) {
    const MultiRisk mr = mc_risk_multi(pair, d, lambda_grid[j], n_reps, seed, j, mc);
    DominanceRow row;
    row.lambda = lambda_grid[j];
    row.risk_a = mr.risks[0].risk;
    row.risk_b = mr.risks[1].risk;
    row.difference = -mr.paired[1].risk;  // paired[1] holds loss_b - loss_a
    row.std_err = mr.paired[1].std_err;
    if (row.difference < -3.0 * row.std_err) {
      row.verdict = Verdict::ADominates;
    } else if (row.difference > 3.0 * row.std_err) {
      row.verdict = Verdict::BDominates;
    } else {
      row.verdict = Verdict::Indistinguishable;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

MinimaxReport minimax_check(const ShrinkageRule& rule, const RadialDensity& d, std::span<const double> lambda_grid,
                            std::int64_t n_reps, std::uint64_t seed, const McConfig& mc) {
  MinimaxReport rep;
  rep.curve = risk_curve(rule, d, lambda_grid, n_reps, seed, mc);
  rep.bound = d.dims().p;
  rep.passed = true;
  rep.worst_margin = -std::numeric_limits<double>::infinity();
  for (const auto& pt : rep.curve.points) {
    const double excess = pt.risk - rep.bound;
    if (excess > 3.0 * pt.std_err) rep.passed = false;
    const double margin = pt.std_err > 0.0 ? excess / pt.std_err : (excess > 0.0 ? INFINITY : -INFINITY);
    rep.worst_margin = std::max(rep.worst_margin, margin);
  }
  return rep;
}

// ---------------------------------------------------------------------------

BayesRiskEvaluator::BayesRiskEvaluator(RadialDensity density, PriorSpec prior, QuadConfig cfg)
    : density_(std::move(density)),
      prior_(prior.normalized()),
      cfg_(cfg),
      engine_(density_, prior_, cfg_) {
  QuadConfig mass_cfg;
  mass_cfg.rel_tol = 1e-9;
  const double mass = prior_.total_mass(mass_cfg);
  if (std::abs(mass - 1.0) > 1e-6) throw DomainError("Bayes risk: prior mass is not 1 after normalization");
}

const PosteriorIntegrals& BayesRiskEvaluator::node(double w) {
  auto it = nodes_.find(w);
  if (it != nodes_.end()) return it->second;
  return nodes_.emplace(w, engine_.integrals(w)).first->second;
}

double BayesRiskEvaluator::bayes_psi(double w) { return node(w).psi; }

BayesRiskEvaluator::Result BayesRiskEvaluator::risk(const ShrinkageRule& rule) {
  if (rule.dims() != density_.dims()) throw DimensionMismatch("Bayes risk: rule and density differ in (p, n)");
  if (rule.kind() == ShrinkageRule::Kind::Natural) return {static_cast<double>(density_.dims().p), 0.0};
  return risk([&rule](double w) { return rule.psi(w); });
}

BayesRiskEvaluator::Result BayesRiskEvaluator::risk(const std::function<double(double)>& psi) {
  const int p = density_.dims().p;
  const double c = sphere_constant(density_.dims().n) * sphere_constant(p);
  // v = log w; the integrand carries w^(p/2 + 1) and decays like a power of w
  // at both ends.
  auto integrand = [&](double v) {
    const double w = std::exp(v);
    const PosteriorIntegrals& pi = node(w);
    const double ps = psi(w);
    return c * std::exp((0.5 * p + 1.0) * v) * ps * (ps - 2.0 * pi.psi) * pi.m1;
  };
  const double pts[] = {-40.0, -20.0, -10.0, -5.0, -2.5, 0.0, 2.5, 5.0, 10.0, 20.0, 30.0};
  QuadConfig qc;
  qc.abs_tol = 1e-9;
  qc.rel_tol = 1e-7;
  const QuadResult r = integrate_1d(integrand, pts, qc);
  return {p + r.value, r.error};
}

RiskPoint mc_bayes_risk(const ShrinkageRule& rule, const RadialDensity& d, const PriorSpec& prior,
                        std::int64_t n_reps, std::uint64_t seed, const McConfig& mc) {
  check_rules(std::span<const ShrinkageRule>(&rule, 1), d);
  require_reps(n_reps);
  const int p = d.dims().p;
  const int n = d.dims().n;
  const int chunks = chunk_count(n_reps, mc.chunk);
  constexpr std::uint64_t kBayesStream = 0x6261'7965'73ULL;
  std::vector<std::vector<double>> parts(chunks);
  detail::parallel_for(chunks, mc.threads, [&](int c) {
    const std::int64_t m =
        std::min<std::int64_t>(static_cast<std::int64_t>(mc.chunk), n_reps - static_cast<std::int64_t>(c) * mc.chunk);
    Rng rng(stream_seed(seed, kBayesStream, static_cast<std::uint64_t>(c)));
    std::normal_distribution<double> normal;
    std::gamma_distribution<double> chi_rest(0.5 * (p - 1), 2.0);
    std::gamma_distribution<double> chi_resid(0.5 * n, 2.0);
    auto& losses = parts[c];
    for (std::int64_t i = 0; i < m; ++i) {
      const double lambda = prior.sample_lambda(rng);
      const double g = d.draw_mixing_scale(rng);
      const double root = std::sqrt(lambda);
      const double x1 = root + std::sqrt(g) * normal(rng);
      const double r2 = g * chi_rest(rng);
      const double s = g * chi_resid(rng);
      const double w = (x1 * x1 + r2) / s;
      if (w == 0.0 && rule.kind() == ShrinkageRule::Kind::JamesStein) continue;
      double psi;
      rule.psi_batch(std::span<const double>(&w, 1), std::span<double>(&psi, 1));
      const double a = 1.0 - psi;
      const double dev = a * x1 - root;
      losses.push_back(dev * dev + a * a * r2);
    }
  });
  const kernels::KernelTable& k = kernels::active_kernels();
  Accumulator acc;
  for (const auto& part : parts) acc.add(k.moments(part.data(), part.size()), static_cast<std::int64_t>(part.size()));
  return acc.finish(std::numeric_limits<double>::quiet_NaN(), rule.id(), n_reps - acc.count);
}

void write_risk_csv(std::ostream& out, const std::vector<RiskCurve>& curves) {
  out << "lambda,risk,std_err,n_reps,estimator\n";
  for (const auto& c : curves) {
    for (const auto& pt : c.points) {
      out << io::format_double(pt.lambda) << ',' << io::format_double(pt.risk) << ','
          << io::format_double(pt.std_err) << ',' << pt.n_reps << ',' << io::csv_field(pt.estimator_id) << '\n';
    }
  }
}

}  // namespace equishrink
