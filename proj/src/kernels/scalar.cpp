#include "equishrink/kernels.hpp"

namespace equishrink::kernels {

namespace {

void statistic(const double* x1, const double* r2, const double* s, double* w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) w[i] = (x1[i] * x1[i] + r2[i]) / s[i];
}

void aligned_loss(const double* x1, const double* r2, const double* psi, double root_lambda, double* loss,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 1.0 - psi[i];
    const double d = a * x1[i] - root_lambda;
    loss[i] = d * d + (a * a) * r2[i];
  }
}

void subtract(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

Moments moments(const double* v, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  double q[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int k = 0; k < 4; ++k) {
      s[k] += v[i + k];
      q[k] += v[i + k] * v[i + k];
    }
  }
  // tail goes into the leading lanes, as the vector code does
  for (int k = 0; i < n; ++i, ++k) {
    s[k] += v[i];
    q[k] += v[i] * v[i];
  }
  return {(s[0] + s[1]) + (s[2] + s[3]), (q[0] + q[1]) + (q[2] + q[3])};
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", statistic, aligned_loss, subtract, moments};
  return table;
}

const KernelTable& active_kernels() {
  static const KernelTable& table = avx2_kernels() ? *avx2_kernels() : scalar_kernels();
  return table;
}

#ifndef EQUISHRINK_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

}  // namespace equishrink::kernels
