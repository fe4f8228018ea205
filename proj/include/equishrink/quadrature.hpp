#pragma once

// Adaptive Gauss-Kronrod integration, Gauss-Jacobi rules, and the weighted
// Beta-type integrals used by the closed-form shrinkage rules.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "equishrink/error.hpp"

namespace equishrink {

struct QuadConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_depth = 60;
  // Initial subdivision counts for the angular and radial sweeps of the
  // posterior integrals (each panel is refined adaptively afterwards).
  int angular_panels = 4;
  int radial_panels = 8;
  int max_intervals = 5000;

  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

/// Nodes and weights of a fixed rule on [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Jacobi rule on [0, 1] for the weight (1 - t)^alpha * t^beta.
/// Golub-Welsch on the Jacobi matrix; alpha, beta > -1.
GaussRule gauss_jacobi_unit(int n, double alpha, double beta);

/// Adaptive integral of fn over [a, b]; b may be +infinity, in which case the
/// half-line is mapped by t = a + u / (1 - u). Error estimate satisfies
/// err <= max(abs_tol, rel_tol * |value|) or NonConvergence is thrown.
QuadResult integrate_1d(const std::function<double(double)>& fn, double a, double b, const QuadConfig& cfg);

/// Same as above with interior breakpoints. `points` is increasing; the last
/// entry may be +infinity.
QuadResult integrate_1d(const std::function<double(double)>& fn, std::span<const double> points,
                        const QuadConfig& cfg);

/// \int_0^1 g(t) (1-t)^alpha dt for alpha in (-1, 0]. Adaptive path through
/// the substitution u = (1-t)^(1+alpha).
double integrate_beta_weighted(const std::function<double(double)>& g, double alpha, const QuadConfig& cfg);

/// Gauss-Jacobi path for the same integral (fixed n-point rule).
double integrate_beta_weighted_gj(const std::function<double(double)>& g, double alpha, int n);

/// \int_0^1 t^left (1-t)^right g(t) dt with both endpoint powers removed by
/// substitution. `feature_scale` marks where g changes on a short scale near
/// t = 0 (e.g. 1/w for (1 + w t)^-k); breakpoints are placed geometrically
/// from there. left, right > -1.
QuadResult integrate_jacobi_weighted(const std::function<double(double)>& g, double left, double right,
                                     double feature_scale, const QuadConfig& cfg);

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208728299625, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
struct Panel {
  double a, b;
  bool mapped;  // [a, b] in u-space of t = origin + u / (1 - u)
  double origin;
  int depth;
  Vec<N> value;
  Vec<N> error;
  double weighted_error;
};

template <std::size_t N>
struct AdaptiveResult {
  Vec<N> value{};
  Vec<N> error{};
  int evaluations = 0;
  bool converged = false;
};

/// Tolerance for vector-valued integrands: the sum over panels of
/// max_k(weight_k * err_k) must fall below max(abs_tol, rel_tol * |I_0|).
template <std::size_t N>
struct VecTolerance {
  double abs_tol;
  double rel_tol;
  Vec<N> weights;
  int max_depth;
  int max_intervals;
};

template <std::size_t N, class F>
void gk21(F& f, Panel<N>& panel) {
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  const double centr = 0.5 * (panel.a + panel.b);
  const double hlgth = 0.5 * (panel.b - panel.a);
  const double dhlgth = std::abs(hlgth);

  auto eval = [&](double u) -> Vec<N> {
    if (!panel.mapped) return f(u);
    const double one_minus = 1.0 - u;
    const double t = panel.origin + u / one_minus;
    if (!std::isfinite(t)) return Vec<N>{};
    const double jac = 1.0 / (one_minus * one_minus);
    Vec<N> v = f(t);
    for (auto& c : v) c *= jac;
    return v;
  };

  std::array<Vec<N>, 21> fv;
  fv[10] = eval(centr);
  for (int j = 0; j < 10; ++j) {
    const double absc = hlgth * kXgk[j];
    fv[j] = eval(centr - absc);
    fv[20 - j] = eval(centr + absc);
  }
  for (std::size_t k = 0; k < N; ++k) {
    double resk = kWgk[10] * fv[10][k];
    double resg = 0.0;
    double resabs = std::abs(resk);
    for (int j = 0; j < 10; ++j) {
      const double pair = fv[j][k] + fv[20 - j][k];
      resk += kWgk[j] * pair;
      resabs += kWgk[j] * (std::abs(fv[j][k]) + std::abs(fv[20 - j][k]));
      if (j % 2 == 1) resg += kWg[j / 2] * pair;
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[10] * std::abs(fv[10][k] - reskh);
    for (int j = 0; j < 10; ++j) {
      resasc += kWgk[j] * (std::abs(fv[j][k] - reskh) + std::abs(fv[20 - j][k] - reskh));
    }
    const double result = resk * hlgth;
    resabs *= dhlgth;
    resasc *= dhlgth;
    double err = std::abs((resk - resg) * hlgth);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) err = std::max(50.0 * kEps * resabs, err);
    panel.value[k] = result;
    panel.error[k] = std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
  }
}

/// Global adaptive bisection over the given breakpoints (last may be +inf).
/// Returns converged = false rather than throwing so callers can attach context.
template <std::size_t N, class F>
AdaptiveResult<N> adaptive_integrate(F&& f, std::span<const double> points, const VecTolerance<N>& tol) {
  auto weigh = [&](Panel<N>& p) {
    double m = 0.0;
    for (std::size_t k = 0; k < N; ++k) m = std::max(m, tol.weights[k] * p.error[k]);
    p.weighted_error = m;
  };
  auto cmp = [](const Panel<N>& x, const Panel<N>& y) { return x.weighted_error < y.weighted_error; };
  std::priority_queue<Panel<N>, std::vector<Panel<N>>, decltype(cmp)> heap(cmp);
  std::vector<Panel<N>> frozen;

  AdaptiveResult<N> out;
  Vec<N> total{};
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double a = points[i];
    const double b = points[i + 1];
    if (!(b > a)) continue;
    Panel<N> p{};
    if (std::isinf(b)) {
      p = Panel<N>{0.0, 1.0, true, a, 0, {}, {}, 0.0};
    } else {
      p = Panel<N>{a, b, false, 0.0, 0, {}, {}, 0.0};
    }
    gk21(f, p);
    out.evaluations += 21;
    weigh(p);
    for (std::size_t k = 0; k < N; ++k) total[k] += p.value[k];
    total_err += p.weighted_error;
    heap.push(p);
  }

  int intervals = static_cast<int>(heap.size());
  auto target = [&]() {
    return std::max(tol.abs_tol, tol.rel_tol * std::abs(total[0]));
  };
  while (!heap.empty() && total_err > target() && intervals < tol.max_intervals) {
    Panel<N> worst = heap.top();
    heap.pop();
    if (worst.depth >= tol.max_depth) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    Panel<N> left{worst.a, mid, worst.mapped, worst.origin, worst.depth + 1, {}, {}, 0.0};
    Panel<N> right{mid, worst.b, worst.mapped, worst.origin, worst.depth + 1, {}, {}, 0.0};
    gk21(f, left);
    gk21(f, right);
    out.evaluations += 42;
    weigh(left);
    weigh(right);
    for (std::size_t k = 0; k < N; ++k) total[k] += left.value[k] + right.value[k] - worst.value[k];
    total_err += left.weighted_error + right.weighted_error - worst.weighted_error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }

  // Re-sum from scratch; the running totals accumulate cancellation error.
  Vec<N> value{};
  Vec<N> error{};
  double werr = 0.0;
  auto absorb = [&](const Panel<N>& p) {
    for (std::size_t k = 0; k < N; ++k) {
      value[k] += p.value[k];
      error[k] += p.error[k];
    }
    werr += p.weighted_error;
  };
  for (const auto& p : frozen) absorb(p);
  while (!heap.empty()) {
    absorb(heap.top());
    heap.pop();
  }
  out.value = value;
  out.error = error;
  out.converged = werr <= std::max(tol.abs_tol, tol.rel_tol * std::abs(value[0])) && std::isfinite(werr);
  return out;
}

}  // namespace detail
}  // namespace equishrink
