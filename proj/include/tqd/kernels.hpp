#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace tqd::kernels {

inline constexpr int kMaxKernelDim = 32;

// Squared whitened distance for a batch of points stored dimension-major:
//   q[i] = sum_r ( sum_{c<=r} w[r*dim + c] * (x[c*stride + i] - mu[c]) )^2
// for i in [0, n). `w` is lower triangular (the inverse Cholesky factor).
using MahalanobisFn = void (*)(const double* x, std::size_t stride, std::size_t n, int dim, const double* w,
                               const double* mu, double* q);

void mahalanobis_scalar(const double* x, std::size_t stride, std::size_t n, int dim, const double* w,
                        const double* mu, double* q);
#if defined(TQD_HAVE_AVX2_KERNELS)
void mahalanobis_avx2(const double* x, std::size_t stride, std::size_t n, int dim, const double* w,
                      const double* mu, double* q);
#endif
#if defined(TQD_HAVE_NEON_KERNELS)
void mahalanobis_neon(const double* x, std::size_t stride, std::size_t n, int dim, const double* w,
                      const double* mu, double* q);
#endif

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
// Every ISA this build and CPU can run, scalar first.
std::vector<Isa> available_isas();

// Best available ISA; TQD_SIMD=scalar|avx2|neon in the environment overrides
// when the requested one is available.
Isa active_isa();
MahalanobisFn mahalanobis_for(Isa isa);

void mahalanobis_batch(const double* x, std::size_t stride, std::size_t n, int dim, const double* w,
                       const double* mu, double* q);

}  // namespace tqd::kernels
