#pragma once

// Batch kernels for the Monte Carlo risk loop, with a scalar reference and an
// AVX2 variant picked at runtime. Both variants accumulate in four
// interleaved lanes and combine them as (l0 + l1) + (l2 + l3) without fused
// multiply-add, so they agree bit for bit.

#include <cstddef>

namespace equishrink::kernels {

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

struct KernelTable {
  const char* name;
  /// w[i] = (x1[i]^2 + r2[i]) / s[i]
  void (*statistic)(const double* x1, const double* r2, const double* s, double* w, std::size_t n);
  /// loss[i] = ((1 - psi[i]) x1[i] - root_lambda)^2 + (1 - psi[i])^2 r2[i]
  void (*aligned_loss)(const double* x1, const double* r2, const double* psi, double root_lambda, double* loss,
                       std::size_t n);
  /// out[i] = a[i] - b[i]
  void (*subtract)(const double* a, const double* b, double* out, std::size_t n);
  Moments (*moments)(const double* v, std::size_t n);
};

const KernelTable& scalar_kernels();
/// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_kernels();
/// The table used by the risk code: AVX2 when available, scalar otherwise.
const KernelTable& active_kernels();

}  // namespace equishrink::kernels
