#include "equishrink/estimators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <mutex>
#include <sstream>
#include <vector>

#include "equishrink/error.hpp"
#include "equishrink/interp.hpp"
#include "parallel.hpp"

namespace equishrink {

namespace {

// PsiAlpha batch table: log psi against log w.
constexpr double kAlphaLogLo = -30.0;
constexpr double kAlphaLogHi = 30.0;
constexpr int kAlphaNodes = 2049;

// NumericBayes cache: 256 log-spaced w in [1e-4, 1e6].
constexpr int kBayesNodes = 256;
const double kBayesLogLo = std::log(1e-4);
const double kBayesLogHi = std::log(1e6);

QuadConfig tight_config() {
  QuadConfig c;
  c.abs_tol = 1e-300;
  c.rel_tol = 1e-12;
  return c;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

struct ShrinkageRule::Cache {
  std::once_flag once;      // PsiAlpha table is filled on first use
  UniformSpline log_table;  // PsiAlpha
  MonotoneCubic log_cache;  // NumericBayes
  double psi0 = 0.0;
  double psi_lo = 0.0;  // psi at the lower end of the grid
  double tail = 0.0;    // w * psi at the upper end of the grid
  double error = 0.0;
};

// ---------------------------------------------------------------------------

double psi_alpha_value(ProblemDim dims, double alpha, double w, const QuadConfig& cfg) {
  dims.require_shrinkage();
  if (!(alpha > -0.5) || !(alpha <= 0.0)) throw DomainError("psi-alpha: alpha must lie in (-1/2, 0]");
  if (!(w >= 0.0)) throw DomainError("psi-alpha: w must be nonnegative");
  const double half_p = 0.5 * dims.p;
  if (w == 0.0) return (half_p - alpha - 1.0) / half_p;
  if (std::isinf(w)) return 0.0;
  const double expo = -0.5 * dims.total() - 1.0;
  auto g = [&](double t) { return std::pow(1.0 + w * t, expo); };
  const double feature = w > 1.0 ? 1.0 / w : 1.0;
  const double i1 = integrate_jacobi_weighted(g, half_p - alpha - 1.0, alpha, feature, cfg).value;
  const double i0 = integrate_jacobi_weighted(g, half_p - alpha - 2.0, alpha, feature, cfg).value;
  return i1 / i0;
}

double psi_zero_plain(ProblemDim dims, double w, const QuadConfig& cfg) {
  dims.require_shrinkage();
  if (!(w >= 0.0)) throw DomainError("psi_0: w must be nonnegative");
  const double half_p = 0.5 * dims.p;
  const double expo = -0.5 * dims.total() - 1.0;
  auto moment = [&](double power) {
    auto f = [&](double t) { return t == 0.0 ? 0.0 : std::pow(t, power) * std::pow(1.0 + w * t, expo); };
    std::vector<double> pts{0.0};
    if (w > 1.0) {
      for (double c = 1e-2 / w; c < 1.0; c *= 4.0) pts.push_back(c);
    }
    pts.push_back(1.0);
    return integrate_1d(f, pts, cfg).value;
  };
  return moment(half_p - 1.0) / moment(half_p - 2.0);
}

// ---------------------------------------------------------------------------

ShrinkageRule ShrinkageRule::natural(ProblemDim dims) { return ShrinkageRule(Kind::Natural, dims); }

ShrinkageRule ShrinkageRule::james_stein(ProblemDim dims) {
  dims.require_shrinkage();
  ShrinkageRule r(Kind::JamesStein, dims);
  r.a_ = (dims.p - 2.0) / (dims.n + 2.0);
  return r;
}

ShrinkageRule ShrinkageRule::psi_alpha(ProblemDim dims, double alpha) {
  dims.require_shrinkage();
  if (!(alpha > -0.5) || !(alpha <= 0.0)) {
    throw DomainError("psi-alpha: alpha must lie in (-1/2, 0], got " + fmt(alpha));
  }
  ShrinkageRule r(Kind::PsiAlpha, dims);
  r.alpha_ = alpha;

  r.cache_ = std::make_shared<Cache>();
  return r;
}

void ShrinkageRule::fill_alpha_table() const {
  std::call_once(cache_->once, [this] {
    Cache& c = *cache_;
    const QuadConfig cfg = tight_config();
    const double h = (kAlphaLogHi - kAlphaLogLo) / (kAlphaNodes - 1);
    std::vector<double> y(kAlphaNodes);
    for (int j = 0; j < kAlphaNodes; ++j) {
      y[j] = std::log(psi_alpha_value(dims_, alpha_, std::exp(kAlphaLogLo + h * j), cfg));
    }
    c.log_table = UniformSpline(kAlphaLogLo, h, std::move(y));
    c.psi0 = psi_alpha_value(dims_, alpha_, 0.0);
    c.psi_lo = std::exp(c.log_table.value(kAlphaLogLo));
    c.tail = std::exp(kAlphaLogHi + c.log_table.value(kAlphaLogHi));
    double err = 0.0;
    for (int j = 3; j + 1 < kAlphaNodes; j += 64) {
      const double x = kAlphaLogLo + h * (j + 0.5);
      err = std::max(err, std::abs(std::expm1(c.log_table.value(x) -
                                              std::log(psi_alpha_value(dims_, alpha_, std::exp(x), cfg)))));
    }
    c.error = err;
  });
}

ShrinkageRule ShrinkageRule::simple_bayes(ProblemDim dims, double a, double b) {
  dims.require_shrinkage();
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("simple-bayes: a must be positive, got " + fmt(a));
  if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("simple-bayes: b must be nonnegative, got " + fmt(b));
  ShrinkageRule r(Kind::SimpleBayes, dims);
  r.a_ = a;
  r.b_ = b;
  return r;
}

ShrinkageRule ShrinkageRule::numeric_bayes(RadialDensity density, PriorSpec prior, QuadConfig cfg, unsigned threads) {
  const ProblemDim dims = density.dims();
  dims.require_shrinkage();
  ShrinkageRule r(Kind::NumericBayes, dims);
  auto engine = std::make_shared<const PosteriorEngine>(std::move(density), std::move(prior), cfg);

  auto cache = std::make_shared<Cache>();
  const double h = (kBayesLogHi - kBayesLogLo) / (kBayesNodes - 1);
  // Held-out midpoints for the error report, every 16th interval.
  std::vector<double> held;
  for (int j = 7; j + 1 < kBayesNodes; j += 16) held.push_back(kBayesLogLo + h * (j + 0.5));
  const int total = kBayesNodes + static_cast<int>(held.size()) + 1;
  std::vector<double> values(total);
  detail::parallel_for(total, threads, [&](int i) {
    double w;
    if (i < kBayesNodes) {
      w = std::exp(kBayesLogLo + h * i);
    } else if (i < total - 1) {
      w = std::exp(held[i - kBayesNodes]);
    } else {
      w = 0.0;
    }
    values[i] = engine->psi(w);
  });
  std::vector<double> y(kBayesNodes);
  for (int j = 0; j < kBayesNodes; ++j) {
    if (!(values[j] > 0.0)) throw DomainError("bayes rule: psi is not positive at a cache node");
    y[j] = std::log(values[j]);
  }
  cache->log_cache = MonotoneCubic(kBayesLogLo, h, std::move(y));
  cache->psi0 = values[total - 1];
  cache->psi_lo = values[0];
  cache->tail = std::exp(kBayesLogHi) * values[kBayesNodes - 1];
  double err = 0.0;
  for (std::size_t k = 0; k < held.size(); ++k) {
    const double exact = values[kBayesNodes + k];
    err = std::max(err, std::abs(std::exp(cache->log_cache.value(held[k])) - exact) / exact);
  }
  cache->error = err;
  r.engine_ = std::move(engine);
  r.cache_ = std::move(cache);
  return r;
}

ShrinkageRule ShrinkageRule::custom(ProblemDim dims, std::function<double(double)> psi, std::string label) {
  dims.require_shrinkage();
  if (!psi) throw DomainError("custom rule: psi is empty");
  ShrinkageRule r(Kind::Custom, dims);
  r.custom_ = std::make_shared<const std::function<double(double)>>(std::move(psi));
  r.label_ = std::move(label);
  return r;
}

std::string ShrinkageRule::id() const {
  switch (kind_) {
    case Kind::Natural:
      return "natural";
    case Kind::JamesStein:
      return "js";
    case Kind::PsiAlpha:
      return "psi-alpha:" + fmt(alpha_);
    case Kind::SimpleBayes:
      return "simple-bayes:" + fmt(a_) + "," + fmt(b_);
    case Kind::NumericBayes:
      return "bayes:" + engine_->prior().id() + "|" + engine_->density().id();
    case Kind::Custom:
      return label_;
  }
  return {};
}

double ShrinkageRule::cache_error() const {
  if (kind_ == Kind::PsiAlpha) fill_alpha_table();
  return cache_ ? cache_->error : 0.0;
}

double ShrinkageRule::psi(double w) const {
  if (!(w >= 0.0)) throw DomainError("psi: w must be nonnegative");
  switch (kind_) {
    case Kind::Natural:
      return 0.0;
    case Kind::JamesStein:
      if (w == 0.0) throw SingularityError("James-Stein: psi is unbounded at w = 0");
      return a_ / w;
    case Kind::PsiAlpha:
      return psi_alpha_value(dims_, alpha_, w, tight_config());
    case Kind::SimpleBayes:
      return a_ / (w + (a_ + 1.0) * (b_ + 1.0));
    case Kind::NumericBayes:
      return psi_fast(w);
    case Kind::Custom:
      return (*custom_)(w);
  }
  return 0.0;
}

PosteriorIntegrals ShrinkageRule::psi_direct(double w) const {
  if (kind_ != Kind::NumericBayes) throw DomainError("psi_direct: only defined for the Bayes rule");
  return engine_->integrals(w);
}

double ShrinkageRule::psi_fast(double w) const {
  switch (kind_) {
    case Kind::PsiAlpha: {
      fill_alpha_table();
      const Cache& c = *cache_;
      if (w == 0.0) return c.psi0;
      if (std::isinf(w)) return 0.0;
      const double x = std::log(w);
      // psi is linear in w below the table and ~ tail / w above it
      if (x < kAlphaLogLo) return c.psi0 + (c.psi_lo - c.psi0) * (w / std::exp(kAlphaLogLo));
      if (x > kAlphaLogHi) return c.tail / w;
      return std::exp(c.log_table.value(x));
    }
    case Kind::NumericBayes: {
      const Cache& c = *cache_;
      if (w == 0.0) return c.psi0;
      if (std::isinf(w)) return 0.0;
      const double x = std::log(w);
      if (x < kBayesLogLo) return c.psi0 + (c.psi_lo - c.psi0) * (w / std::exp(kBayesLogLo));
      if (x > kBayesLogHi) return c.tail / w;
      return std::exp(c.log_cache.value(x));
    }
    default:
      return psi(w);
  }
}

void ShrinkageRule::psi_batch(std::span<const double> w, std::span<double> out) const {
  if (out.size() < w.size()) throw DimensionMismatch("psi_batch: output span too short");
  const std::size_t n = w.size();
  switch (kind_) {
    case Kind::Natural:
      std::fill_n(out.begin(), n, 0.0);
      return;
    case Kind::JamesStein:
      for (std::size_t i = 0; i < n; ++i) {
        if (!(w[i] > 0.0)) throw SingularityError("James-Stein: psi is unbounded at w = 0");
        out[i] = a_ / w[i];
      }
      return;
    case Kind::SimpleBayes: {
      const double c = (a_ + 1.0) * (b_ + 1.0);
      for (std::size_t i = 0; i < n; ++i) out[i] = a_ / (w[i] + c);
      return;
    }
    default:
      for (std::size_t i = 0; i < n; ++i) {
        if (!(w[i] >= 0.0)) throw DomainError("psi: w must be nonnegative");
        out[i] = psi_fast(w[i]);
      }
  }
}

Eigen::VectorXd apply_shrinkage(const ShrinkageRule& rule, const Observation& obs) {
  if (obs.p() != rule.dims().p) throw DimensionMismatch("apply_shrinkage: x has the wrong length");
  const double w = w_statistic(obs);
  return (1.0 - rule.psi(w)) * obs.x();
}

// ---------------------------------------------------------------------------

double alpha_to_a(double alpha, ProblemDim dims) {
  if (!(alpha > -1.0)) throw DomainError("alpha_to_a: alpha must exceed -1");
  return (0.5 * dims.total() - alpha - 1.0) / (alpha + 1.0);
}

double a_to_alpha(double a, ProblemDim dims) {
  if (!(a > -1.0)) throw DomainError("a_to_alpha: a must exceed -1");
  // a (alpha + 1) = (p+n)/2 - 1 - alpha  =>  alpha = ((p+n)/2 - 1 - a) / (a + 1)
  return (0.5 * dims.total() - 1.0 - a) / (a + 1.0);
}

std::pair<double, double> minimax_a_range(ProblemDim dims) {
  dims.require_shrinkage();
  const double lo = (dims.p - 2.0) / (dims.n + 2.0);
  return {lo, 2.0 * lo};
}

double minimax_alpha_lower_bound(ProblemDim dims) {
  dims.require_shrinkage();
  return -1.0 / (5.0 + 2.0 / (dims.p - 2.0) + 3.0 * dims.p / (dims.n + 2.0));
}

// ---------------------------------------------------------------------------
// Text grammars

namespace {

double parse_number(const std::string& text, const std::string& context) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw ParseError(context + ": '" + text + "' is not a number");
  }
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& context) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(parse_number(text.substr(start, comma - start), context));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::pair<std::string, std::string> split_head(const std::string& spec) {
  const std::size_t colon = spec.find(':');
  if (colon == std::string::npos) return {spec, ""};
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

void expect_count(const std::vector<double>& v, std::size_t lo, std::size_t hi, const std::string& context) {
  if (v.size() < lo || v.size() > hi) {
    throw ParseError(context + ": expected " + std::to_string(lo) + (lo == hi ? "" : "-" + std::to_string(hi)) +
                     " values, got " + std::to_string(v.size()));
  }
}

}  // namespace

RadialDensity parse_density(const std::string& spec, ProblemDim dims) {
  auto [head, rest] = split_head(spec);
  if (head == "gaussian") {
    if (!rest.empty()) throw ParseError("density 'gaussian' takes no parameters");
    return RadialDensity::gaussian(dims);
  }
  if (head == "gt") {
    const auto v = parse_list(rest, "density gt");
    expect_count(v, 1, 2, "density gt:A[,B]");
    return v.size() == 1 ? RadialDensity::generalized_t(dims, v[0]) : RadialDensity::generalized_t(dims, v[0], v[1]);
  }
  throw ParseError("unknown density '" + spec + "' (expected gaussian | gt:A[,B])");
}

PriorSpec parse_prior(const std::string& spec, int p) {
  auto [head, rest] = split_head(spec);
  if (head == "power") {
    const auto v = parse_list(rest, "prior power");
    expect_count(v, 1, 1, "prior power:ALPHA");
    return PriorSpec::power(p, v[0]);
  }
  if (head == "strawderman") {
    const auto v = parse_list(rest, "prior strawderman");
    expect_count(v, 3, 3, "prior strawderman:ALPHA,BETA,B");
    return PriorSpec::strawderman(p, v[0], v[1], v[2]);
  }
  throw ParseError("unknown prior '" + spec + "' (expected power:ALPHA | strawderman:ALPHA,BETA,B)");
}

ShrinkageRule parse_rule(const std::string& spec, const RadialDensity& density, unsigned threads) {
  const ProblemDim dims = density.dims();
  auto [head, rest] = split_head(spec);
  auto no_args = [&, r = rest] {
    if (!r.empty()) throw ParseError("rule '" + head + "' takes no parameters");
  };
  if (head == "natural") {
    no_args();
    return ShrinkageRule::natural(dims);
  }
  if (head == "js") {
    no_args();
    return ShrinkageRule::james_stein(dims);
  }
  if (head == "psi-alpha") {
    const auto v = parse_list(rest, "rule psi-alpha");
    expect_count(v, 1, 1, "rule psi-alpha:ALPHA");
    return ShrinkageRule::psi_alpha(dims, v[0]);
  }
  if (head == "simple-bayes") {
    const auto v = parse_list(rest, "rule simple-bayes");
    expect_count(v, 2, 2, "rule simple-bayes:A,B");
    return ShrinkageRule::simple_bayes(dims, v[0], v[1]);
  }
  if (head == "bayes") {
    std::string prior = rest;
    if (prior.rfind("prior=", 0) == 0) prior = prior.substr(6);
    if (prior.empty()) throw ParseError("rule bayes: missing prior (bayes:power:ALPHA | bayes:strawderman:A,B,C)");
    return ShrinkageRule::numeric_bayes(density, parse_prior(prior, dims.p), QuadConfig{}, threads);
  }
  throw ParseError("unknown rule '" + spec + "' (expected natural | js | psi-alpha:A | simple-bayes:A,B | bayes:PRIOR)");
}

}  // namespace equishrink
