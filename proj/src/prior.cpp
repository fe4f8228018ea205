#include "equishrink/prior.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "equishrink/error.hpp"

namespace equishrink {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kE = std::numbers::e;

// pi-bar table range for the Strawderman mixture, in log(lambda).
constexpr double kTableLogLo = -46.0;  // ~1e-20
constexpr double kTableLogHi = 36.9;   // ~1e16
constexpr int kTableNodes = 1801;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// tapering sequence

double loglog_shifted(double lambda) { return std::log1p(std::log1p(lambda / kE)); }

BlythSequence::BlythSequence(int i) : i_(i) {
  if (i < 1) throw DomainError("BlythSequence: index must be >= 1");
}

namespace {

// loglog(lambda + e + i) - loglog(lambda + e) without cancellation.
double loglog_gap(double lambda, int i) {
  return std::log1p(std::log1p(i / (lambda + kE)) / (1.0 + std::log1p(lambda / kE)));
}

}  // namespace

double BlythSequence::value(double lambda) const {
  if (!(lambda >= 0.0)) throw DomainError("h_i: lambda must be nonnegative");
  if (std::isinf(lambda)) return 0.0;
  return loglog_gap(lambda, i_) / loglog_shifted(lambda + i_);
}

double BlythSequence::derivative(double lambda) const {
  if (!(lambda >= 0.0)) throw DomainError("h_i: lambda must be nonnegative");
  if (std::isinf(lambda)) return 0.0;
  // h = 1 - L0 / Li, h' = -(L0' (Li - L0) + L0 (L0' - Li')) / Li^2
  const double x1 = lambda + kE;
  const double xi = x1 + i_;
  const double l1 = std::log(x1);
  const double li = std::log(xi);
  const double ll1 = loglog_shifted(lambda);
  const double lli = loglog_shifted(lambda + i_);
  const double d1 = 1.0 / (x1 * l1);
  const double d_gap = (i_ * li + x1 * std::log1p(i_ / x1)) / (x1 * l1 * xi * li);
  return -(d1 * loglog_gap(lambda, i_) + ll1 * d_gap) / (lli * lli);
}

// ---------------------------------------------------------------------------
// Strawderman mixture

PriorMoments strawderman_bar(int p, double alpha, double beta, double b, double lambda, bool with_derivative) {
  if (!(lambda >= 0.0)) throw DomainError("strawderman prior: lambda must be nonnegative");
  const double half_p = 0.5 * p;
  if (b == 0.0 && lambda == 0.0) return {kInf, -kInf};

  const double log_norm = -half_p * std::log(2.0 * std::numbers::pi);
  auto log_phi = [&](double v) {
    const double xi = b + std::exp(v);
    return log_norm - half_p * std::log(xi) - lambda / (2.0 * xi) + (alpha + 1.0) * v + beta * std::log1p(xi);
  };

  double v_lo;
  double lower_tail = 0.0;
  double lower_tail_d = 0.0;
  if (b > 0.0) {
    v_lo = std::log(b) - 40.0;
    const double c = std::exp(log_norm - half_p * std::log(b) - lambda / (2.0 * b) + beta * std::log1p(b));
    lower_tail = c * std::exp((alpha + 1.0) * v_lo) / (alpha + 1.0);
    lower_tail_d = lower_tail / b;
  } else {
    // exp(-lambda / (2 xi)) < e^-750 below this point
    v_lo = std::log(lambda) - std::log(1500.0);
  }
  const double v_hi = std::max(std::log(lambda + b + 1.0) + 30.0, v_lo + 4.0);
  const double gamma = alpha + beta + 1.0 - half_p;
  const double phi_hi = std::exp(log_phi(v_hi));
  const double upper_tail = phi_hi / (-gamma);
  const double upper_tail_d = phi_hi * std::exp(-v_hi) / (1.0 - gamma);

  std::vector<double> pts;
  const int panels = std::max(2, static_cast<int>(std::ceil((v_hi - v_lo) / 2.0)));
  for (int j = 0; j <= panels; ++j) pts.push_back(v_lo + (v_hi - v_lo) * j / panels);

  QuadConfig cfg;
  cfg.abs_tol = 1e-300;
  cfg.rel_tol = 1e-12;
  PriorMoments out{};
  out.value = integrate_1d([&](double v) { return std::exp(log_phi(v)); }, pts, cfg).value + lower_tail + upper_tail;
  if (with_derivative) {
    auto g = [&](double v) { return std::exp(log_phi(v)) / (b + std::exp(v)); };
    out.derivative = -0.5 * (integrate_1d(g, pts, cfg).value + lower_tail_d + upper_tail_d);
  }
  return out;
}

struct PriorSpec::Table {
  UniformSpline log_bar;  // log pi-bar against log lambda (unscaled, untapered)
  double low_slope;
  double high_slope;
  double error;
};

PriorSpec PriorSpec::power(int p, double alpha) {
  if (p < 1) throw DomainError("prior: p must be >= 1");
  if (!(alpha > -1.0)) throw DomainError("power prior: alpha must exceed -1");
  PriorSpec s(Kind::Power, p);
  s.alpha_ = alpha;
  s.local_exponent_ = alpha;
  return s;
}

PriorSpec PriorSpec::strawderman(int p, double alpha, double beta, double b) {
  if (p < 1) throw DomainError("prior: p must be >= 1");
  if (!(alpha > -1.0)) throw DomainError("strawderman prior: alpha must exceed -1");
  if (!(b >= 0.0)) throw DomainError("strawderman prior: b must be nonnegative");
  if (!(alpha + beta - 0.5 * p < -1.0)) {
    throw DomainError("strawderman prior: mixture integral diverges (need alpha + beta - p/2 < -1)");
  }
  PriorSpec s(Kind::Strawderman, p);
  s.alpha_ = alpha;
  s.beta_ = beta;
  s.b_ = b;
  s.local_exponent_ = (b > 0.0) ? 0.5 * p - 1.0 : alpha;
  s.build_table();
  return s;
}

PriorSpec PriorSpec::custom(int p, std::function<double(double)> pi, std::function<double(double)> pi_prime,
                            std::string label, std::optional<double> local_exponent) {
  if (p < 1) throw DomainError("prior: p must be >= 1");
  if (!pi) throw DomainError("custom prior: pi is empty");
  PriorSpec s(Kind::Custom, p);
  s.pi_ = std::make_shared<const std::function<double(double)>>(std::move(pi));
  if (pi_prime) s.pi_prime_ = std::make_shared<const std::function<double(double)>>(std::move(pi_prime));
  s.label_ = std::move(label);
  if (local_exponent) {
    s.local_exponent_ = *local_exponent;
  } else {
    const double a = (*s.pi_)(1e-10);
    const double c = (*s.pi_)(1e-9);
    if (!(a > 0.0) || !(c > 0.0)) throw DomainError("custom prior: pi must be positive near 0");
    s.local_exponent_ = std::log(c / a) / std::log(10.0);
  }
  return s;
}

PriorSpec PriorSpec::tapered(int i) const {
  BlythSequence check(i);
  PriorSpec out = *this;
  out.taper_ = check.index();
  return out;
}

PriorSpec PriorSpec::normalized() const {
  if (!is_proper()) throw DomainError("prior " + id() + " is improper and cannot be normalized");
  PriorSpec out = *this;
  out.scale_ = scale_ / total_mass();
  return out;
}

std::string PriorSpec::id() const {
  std::string s;
  switch (kind_) {
    case Kind::Power:
      s = "power:" + fmt(alpha_);
      break;
    case Kind::Strawderman:
      s = "strawderman:" + fmt(alpha_) + "," + fmt(beta_) + "," + fmt(b_);
      break;
    case Kind::Custom:
      s = label_;
      break;
  }
  if (taper_ > 0) s += "@h" + std::to_string(taper_);
  return s;
}

double PriorSpec::base_bar(double lambda) const {
  switch (kind_) {
    case Kind::Power:
      return std::exp((alpha_ + 1.0 - 0.5 * p_) * std::log(lambda)) / sphere_constant(p_);
    case Kind::Strawderman:
      return strawderman_bar(p_, alpha_, beta_, b_, lambda, false).value;
    case Kind::Custom:
      return std::exp((1.0 - 0.5 * p_) * std::log(lambda)) * (*pi_)(lambda) / sphere_constant(p_);
  }
  return 0.0;
}

double PriorSpec::base_value(double lambda) const {
  switch (kind_) {
    case Kind::Power:
      return std::pow(lambda, alpha_);
    case Kind::Strawderman:
      if (lambda == 0.0) {
        // pi ~ lambda^e nu(0) with e the local exponent
        if (local_exponent_ > 0.0) return 0.0;
        if (local_exponent_ < 0.0) return kInf;
        if (b_ > 0.0) return sphere_constant(p_) * base_bar(0.0);
        return sphere_constant(p_) * std::pow(2.0, 0.5 * p_ - 1.0) * std::tgamma(0.5 * p_ - 1.0) *
               std::pow(2.0 * std::numbers::pi, -0.5 * p_);
      }
      return sphere_constant(p_) * std::exp((0.5 * p_ - 1.0) * std::log(lambda)) * base_bar(lambda);
    case Kind::Custom:
      return (*pi_)(lambda);
  }
  return 0.0;
}

double PriorSpec::value(double lambda) const {
  if (!(lambda >= 0.0)) throw DomainError("prior: lambda must be nonnegative");
  double v = scale_ * base_value(lambda);
  if (taper_ > 0) {
    const double h = BlythSequence(taper_).value(lambda);
    v *= h * h;
  }
  return v;
}

double PriorSpec::bar_value(double lambda) const {
  if (!(lambda >= 0.0)) throw DomainError("prior: lambda must be nonnegative");
  double v = scale_ * base_bar(lambda);
  if (taper_ > 0) {
    const double h = BlythSequence(taper_).value(lambda);
    v *= h * h;
  }
  return v;
}

PriorMoments PriorSpec::bar_moments(double lambda) const {
  if (!(lambda > 0.0)) throw DomainError("prior: lambda must be positive");
  PriorMoments m{};
  switch (kind_) {
    case Kind::Power: {
      const double e = alpha_ + 1.0 - 0.5 * p_;
      m.value = base_bar(lambda);
      m.derivative = e * m.value / lambda;
      break;
    }
    case Kind::Strawderman:
      m = strawderman_bar(p_, alpha_, beta_, b_, lambda, true);
      break;
    case Kind::Custom: {
      m.value = base_bar(lambda);
      // pi-bar'/pi-bar = (1 - p/2)/lambda + pi'/pi
      m.derivative = m.value * (1.0 - 0.5 * p_ + base_kappa(lambda)) / lambda;
      break;
    }
  }
  m.value *= scale_;
  m.derivative *= scale_;
  if (taper_ > 0) {
    const BlythSequence seq(taper_);
    const double h = seq.value(lambda);
    const double dh = seq.derivative(lambda);
    m.derivative = m.derivative * h * h + m.value * 2.0 * h * dh;
    m.value *= h * h;
  }
  return m;
}

void PriorSpec::build_table() {
  auto t = std::make_shared<Table>();
  const double h = (kTableLogHi - kTableLogLo) / (kTableNodes - 1);
  std::vector<double> y(kTableNodes);
  for (int j = 0; j < kTableNodes; ++j) {
    y[j] = std::log(strawderman_bar(p_, alpha_, beta_, b_, std::exp(kTableLogLo + h * j), false).value);
  }
  t->log_bar = UniformSpline(kTableLogLo, h, std::move(y));
  t->low_slope = (b_ > 0.0) ? 0.0 : alpha_ + 1.0 - 0.5 * p_;
  t->high_slope = alpha_ + beta_ + 1.0 - 0.5 * p_;
  double err = 0.0;
  for (int j = 3; j + 1 < kTableNodes; j += 17) {
    const double x = kTableLogLo + h * (j + 0.5);
    const double exact = std::log(strawderman_bar(p_, alpha_, beta_, b_, std::exp(x), false).value);
    err = std::max(err, std::abs(std::expm1(t->log_bar.value(x) - exact)));
  }
  t->error = err;
  table_ = std::move(t);
}

double PriorSpec::bar_value_fast(double lambda) const {
  if (!table_) return bar_value(lambda);
  if (!(lambda >= 0.0)) throw DomainError("prior: lambda must be nonnegative");
  const Table& t = *table_;
  double log_bar;
  if (lambda == 0.0) {
    if (t.low_slope < 0.0) return kInf;
    log_bar = t.log_bar.value(kTableLogLo);
  } else {
    const double x = std::log(lambda);
    if (x < kTableLogLo) {
      log_bar = t.log_bar.value(kTableLogLo) + t.low_slope * (x - kTableLogLo);
    } else if (x > t.log_bar.x_end()) {
      log_bar = t.log_bar.value(t.log_bar.x_end()) + t.high_slope * (x - t.log_bar.x_end());
    } else {
      log_bar = t.log_bar.value(x);
    }
  }
  double v = scale_ * std::exp(log_bar);
  if (taper_ > 0) {
    const double h = BlythSequence(taper_).value(lambda);
    v *= h * h;
  }
  return v;
}

double PriorSpec::table_error() const { return table_ ? table_->error : 0.0; }

double PriorSpec::base_kappa(double lambda) const {
  switch (kind_) {
    case Kind::Power:
      return alpha_;
    case Kind::Strawderman: {
      const auto m = strawderman_bar(p_, alpha_, beta_, b_, lambda, true);
      return 0.5 * p_ - 1.0 + lambda * m.derivative / m.value;
    }
    case Kind::Custom: {
      const double v = (*pi_)(lambda);
      if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("kappa: pi is not positive at lambda = " + fmt(lambda));
      if (pi_prime_) return lambda * (*pi_prime_)(lambda) / v;
      constexpr double kStep = 1e-4;
      const double up = (*pi_)(lambda * std::exp(kStep));
      const double down = (*pi_)(lambda * std::exp(-kStep));
      return (std::log(up) - std::log(down)) / (2.0 * kStep);
    }
  }
  return 0.0;
}

double PriorSpec::kappa(double lambda) const {
  if (!(lambda > 0.0)) throw DomainError("kappa: lambda must be positive");
  double k = base_kappa(lambda);
  if (taper_ > 0) {
    const BlythSequence seq(taper_);
    const double h = seq.value(lambda);
    if (!(h > 0.0)) throw DomainError("kappa: tapered prior vanishes at lambda = " + fmt(lambda));
    k += 2.0 * lambda * seq.derivative(lambda) / h;
  }
  return k;
}

bool PriorSpec::is_proper() const {
  if (taper_ > 0) return true;
  switch (kind_) {
    case Kind::Power:
      return false;
    case Kind::Strawderman:
      return alpha_ + beta_ < -1.0;
    case Kind::Custom:
      try {
        return std::isfinite(total_mass());
      } catch (const Error&) {
        return false;
      }
  }
  return false;
}

double PriorSpec::total_mass(const QuadConfig& cfg) const {
  if (kind_ == Kind::Strawderman && taper_ == 0) {
    if (!(alpha_ + beta_ < -1.0)) return kInf;
    return scale_ * std::pow(1.0 + b_, alpha_ + beta_ + 1.0) * std::beta(alpha_ + 1.0, -alpha_ - beta_ - 1.0);
  }
  if (kind_ == Kind::Power && taper_ == 0) return kInf;
  // \int pi(lambda) dlambda = \int pi(e^v) e^v dv; below v_lo pi ~ lambda^e.
  constexpr double kVlo = -60.0;
  auto g = [&](double v) {
    const double lam = std::exp(v);
    if (std::isinf(lam)) return 0.0;
    return value(lam) * lam;
  };
  std::vector<double> pts;
  for (double v = kVlo; v < 60.0; v += 4.0) pts.push_back(v);
  pts.push_back(60.0);
  pts.push_back(kInf);
  QuadConfig c = cfg;
  c.abs_tol = 1e-300;
  const double body = integrate_1d(g, pts, c).value;
  const double lower = g(kVlo) / (local_exponent_ + 1.0);
  return body + lower;
}

double PriorSpec::sample_lambda(Rng& rng) const {
  if (kind_ != Kind::Strawderman || taper_ > 0 || !is_proper()) {
    throw DomainError("sample_lambda: only proper untapered Strawderman priors can be sampled");
  }
  std::gamma_distribution<double> g1(alpha_ + 1.0, 1.0);
  std::gamma_distribution<double> g2(-alpha_ - beta_ - 1.0, 1.0);
  std::chi_squared_distribution<double> chi(p_);
  const double v = g1(rng) / g2(rng);
  const double xi = b_ + (1.0 + b_) * v;
  return xi * chi(rng);
}

}  // namespace equishrink
