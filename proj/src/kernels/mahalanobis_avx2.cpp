#include "tqd/kernels.hpp"

#include <immintrin.h>

namespace tqd::kernels {

// Four points per iteration; the remainder goes through the scalar kernel.
void mahalanobis_avx2(const double* x, std::size_t stride, std::size_t n, int dim, const double* w,
                      const double* mu, double* q) {
  __m256d z[kMaxKernelDim];
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int c = 0; c < dim; ++c)
      z[c] = _mm256_sub_pd(_mm256_loadu_pd(x + c * stride + i), _mm256_set1_pd(mu[c]));
    __m256d sum = _mm256_setzero_pd();
    for (int r = 0; r < dim; ++r) {
      __m256d acc = _mm256_setzero_pd();
      const double* row = w + r * dim;
      for (int c = 0; c <= r; ++c) acc = _mm256_fmadd_pd(_mm256_set1_pd(row[c]), z[c], acc);
      sum = _mm256_fmadd_pd(acc, acc, sum);
    }
    _mm256_storeu_pd(q + i, sum);
  }
  if (i < n) mahalanobis_scalar(x + i, stride, n - i, dim, w, mu, q + i);
}

}  // namespace tqd::kernels
