#include "tqd/kernels.hpp"

#include <arm_neon.h>

namespace tqd::kernels {

void mahalanobis_neon(const double* x, std::size_t stride, std::size_t n, int dim, const double* w,
                      const double* mu, double* q) {
  float64x2_t z[kMaxKernelDim];
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    for (int c = 0; c < dim; ++c) z[c] = vsubq_f64(vld1q_f64(x + c * stride + i), vdupq_n_f64(mu[c]));
    float64x2_t sum = vdupq_n_f64(0.0);
    for (int r = 0; r < dim; ++r) {
      float64x2_t acc = vdupq_n_f64(0.0);
      const double* row = w + r * dim;
      for (int c = 0; c <= r; ++c) acc = vfmaq_n_f64(acc, z[c], row[c]);
      sum = vfmaq_f64(sum, acc, acc);
    }
    vst1q_f64(q + i, sum);
  }
  if (i < n) mahalanobis_scalar(x + i, stride, n - i, dim, w, mu, q + i);
}

}  // namespace tqd::kernels
