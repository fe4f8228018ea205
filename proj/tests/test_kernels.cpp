#include "doctest.h"

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "equishrink/kernels.hpp"

using namespace equishrink::kernels;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

struct Batch {
  std::vector<double> x1, r2, s, psi;
};

Batch make_batch(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::gamma_distribution<double> chi(2.0, 2.0);
  std::uniform_real_distribution<double> u(0.0, 1.2);
  Batch b;
  for (std::size_t i = 0; i < n; ++i) {
    b.x1.push_back(1.5 + z(rng));
    b.r2.push_back(chi(rng));
    b.s.push_back(chi(rng) + 1e-3);
    b.psi.push_back(u(rng));
  }
  return b;
}

}  // namespace

TEST_CASE("scalar kernels compute the documented formulas") {
  const KernelTable& k = scalar_kernels();
  const Batch b = make_batch(37, 3);
  std::vector<double> w(37), loss(37), diff(37);
  k.statistic(b.x1.data(), b.r2.data(), b.s.data(), w.data(), 37);
  k.aligned_loss(b.x1.data(), b.r2.data(), b.psi.data(), 1.25, loss.data(), 37);
  k.subtract(loss.data(), w.data(), diff.data(), 37);
  for (std::size_t i = 0; i < 37; ++i) {
    CHECK(w[i] == doctest::Approx((b.x1[i] * b.x1[i] + b.r2[i]) / b.s[i]).epsilon(1e-15));
    const double a = 1.0 - b.psi[i];
    const double ref = (a * b.x1[i] - 1.25) * (a * b.x1[i] - 1.25) + a * a * b.r2[i];
    CHECK(loss[i] == doctest::Approx(ref).epsilon(1e-14));
    CHECK(diff[i] == loss[i] - w[i]);
  }
}

TEST_CASE("moments match a long-double reference") {
  const Batch b = make_batch(10007, 11);
  const Moments m = scalar_kernels().moments(b.x1.data(), b.x1.size());
  long double s = 0, q = 0;
  for (double v : b.x1) {
    s += v;
    q += static_cast<long double>(v) * v;
  }
  CHECK(m.sum == doctest::Approx(static_cast<double>(s)).epsilon(1e-13));
  CHECK(m.sum_sq == doctest::Approx(static_cast<double>(q)).epsilon(1e-13));
  const Moments empty = scalar_kernels().moments(b.x1.data(), 0);
  CHECK(empty.sum == 0.0);
  CHECK(empty.sum_sq == 0.0);
}

TEST_CASE("avx2 and scalar agree bit for bit") {
  const KernelTable* v = avx2_kernels();
  if (v == nullptr) {
    MESSAGE("AVX2 not available; scalar only");
    CHECK(std::strcmp(active_kernels().name, scalar_kernels().name) == 0);
    return;
  }
  CHECK(std::strcmp(active_kernels().name, v->name) == 0);
  const KernelTable& s = scalar_kernels();
  // Lengths straddle the vector width and the 4-lane unroll.
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 33u, 4096u, 4099u}) {
    const Batch b = make_batch(n, 100 + n);
    std::vector<double> w1(n), w2(n), l1(n), l2(n), d1(n), d2(n);
    s.statistic(b.x1.data(), b.r2.data(), b.s.data(), w1.data(), n);
    v->statistic(b.x1.data(), b.r2.data(), b.s.data(), w2.data(), n);
    s.aligned_loss(b.x1.data(), b.r2.data(), b.psi.data(), 0.7, l1.data(), n);
    v->aligned_loss(b.x1.data(), b.r2.data(), b.psi.data(), 0.7, l2.data(), n);
    s.subtract(l1.data(), w1.data(), d1.data(), n);
    v->subtract(l2.data(), w2.data(), d2.data(), n);
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      ok = ok && same_bits(w1[i], w2[i]) && same_bits(l1[i], l2[i]) && same_bits(d1[i], d2[i]);
    }
    CHECK_MESSAGE(ok, "n = " << n);
    const Moments ms = s.moments(l1.data(), n);
    const Moments mv = v->moments(l2.data(), n);
    CHECK(same_bits(ms.sum, mv.sum));
    CHECK(same_bits(ms.sum_sq, mv.sum_sq));
  }
}
