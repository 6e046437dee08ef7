#include "tqd/kernels.hpp"

namespace tqd::kernels {

void mahalanobis_scalar(const double* x, std::size_t stride, std::size_t n, int dim, const double* w,
                        const double* mu, double* q) {
  double z[kMaxKernelDim];
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < dim; ++c) z[c] = x[c * stride + i] - mu[c];
    double sum = 0.0;
    for (int r = 0; r < dim; ++r) {
      double acc = 0.0;
      for (int c = 0; c <= r; ++c) acc += w[r * dim + c] * z[c];
      sum += acc * acc;
    }
    q[i] = sum;
  }
}

}  // namespace tqd::kernels
