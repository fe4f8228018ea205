#include <immintrin.h>

#include "equishrink/kernels.hpp"

namespace equishrink::kernels {

namespace {

void statistic(const double* x1, const double* r2, const double* s, double* w, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(x1 + i);
    const __m256d num = _mm256_add_pd(_mm256_mul_pd(a, a), _mm256_loadu_pd(r2 + i));
    _mm256_storeu_pd(w + i, _mm256_div_pd(num, _mm256_loadu_pd(s + i)));
  }
  for (; i < n; ++i) w[i] = (x1[i] * x1[i] + r2[i]) / s[i];
}

void aligned_loss(const double* x1, const double* r2, const double* psi, double root_lambda, double* loss,
                  std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d rl = _mm256_set1_pd(root_lambda);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_sub_pd(one, _mm256_loadu_pd(psi + i));
    const __m256d d = _mm256_sub_pd(_mm256_mul_pd(a, _mm256_loadu_pd(x1 + i)), rl);
    const __m256d tail = _mm256_mul_pd(_mm256_mul_pd(a, a), _mm256_loadu_pd(r2 + i));
    _mm256_storeu_pd(loss + i, _mm256_add_pd(_mm256_mul_pd(d, d), tail));
  }
  for (; i < n; ++i) {
    const double a = 1.0 - psi[i];
    const double d = a * x1[i] - root_lambda;
    loss[i] = d * d + (a * a) * r2[i];
  }
}

void subtract(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

Moments moments(const double* v, std::size_t n) {
  __m256d s = _mm256_setzero_pd();
  __m256d q = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(v + i);
    s = _mm256_add_pd(s, x);
    q = _mm256_add_pd(q, _mm256_mul_pd(x, x));
  }
  alignas(32) double sl[4];
  alignas(32) double ql[4];
  _mm256_store_pd(sl, s);
  _mm256_store_pd(ql, q);
  for (int k = 0; i < n; ++i, ++k) {
    sl[k] += v[i];
    ql[k] += v[i] * v[i];
  }
  return {(sl[0] + sl[1]) + (sl[2] + sl[3]), (ql[0] + ql[1]) + (ql[2] + ql[3])};
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{"avx2", statistic, aligned_loss, subtract, moments};
  static const bool usable = __builtin_cpu_supports("avx2");
  return usable ? &table : nullptr;
}

}  // namespace equishrink::kernels
