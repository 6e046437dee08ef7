#include "tqd/kernels.hpp"

#include "tqd/error.hpp"

#include <cstdlib>
#include <string>

namespace tqd::kernels {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(TQD_HAVE_AVX2_KERNELS)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(TQD_HAVE_NEON_KERNELS)
      return true;  // mandatory on aarch64
#else
      return false;
#endif
  }
  return false;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
    if (isa_available(isa)) out.push_back(isa);
  return out;
}

Isa active_isa() {
  static const Isa chosen = [] {
    if (const char* env = std::getenv("TQD_SIMD")) {
      const std::string want(env);
      for (Isa isa : available_isas())
        if (isa_name(isa) == want) return isa;
    }
    const auto all = available_isas();
    return all.back();
  }();
  return chosen;
}

MahalanobisFn mahalanobis_for(Isa isa) {
  if (!isa_available(isa)) fail(ErrorCategory::input, "kernel ISA not available: " + std::string(isa_name(isa)));
  switch (isa) {
#if defined(TQD_HAVE_AVX2_KERNELS)
    case Isa::avx2: return &mahalanobis_avx2;
#endif
#if defined(TQD_HAVE_NEON_KERNELS)
    case Isa::neon: return &mahalanobis_neon;
#endif
    default: return &mahalanobis_scalar;
  }
}

void mahalanobis_batch(const double* x, std::size_t stride, std::size_t n, int dim, const double* w,
                       const double* mu, double* q) {
  if (dim < 1 || dim > kMaxKernelDim) fail(ErrorCategory::input, "kernel dimension out of range");
  static const MahalanobisFn fn = mahalanobis_for(active_isa());
  fn(x, stride, n, dim, w, mu, q);
}

}  // namespace tqd::kernels
