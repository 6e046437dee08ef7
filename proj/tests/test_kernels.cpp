#include "generators.hpp"
#include "tqd/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace tqd;
using namespace tqd::kernels;

namespace {

struct Batch {
  std::vector<double> x;  // dimension-major, stride = n
  std::vector<double> w;
  std::vector<double> mu;
};

Batch random_batch(testgen::Rng& rng, std::size_t n, int dim) {
  Batch b;
  b.x.resize(n * dim);
  for (auto& v : b.x) v = testgen::uniform(rng, -3.0, 3.0);
  b.w.assign(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c <= r; ++c) b.w[r * dim + c] = testgen::uniform(rng, -1.0, 1.0) + (r == c ? 2.0 : 0.0);
  b.mu.resize(dim);
  for (auto& v : b.mu) v = testgen::uniform(rng, -1.0, 1.0);
  return b;
}

double reference(const Batch& b, std::size_t n, int dim, std::size_t i) {
  double q = 0.0;
  for (int r = 0; r < dim; ++r) {
    double acc = 0.0;
    for (int c = 0; c <= r; ++c) acc += b.w[r * dim + c] * (b.x[c * n + i] - b.mu[c]);
    q += acc * acc;
  }
  return q;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("scalar kernel matches the definition") {
    testgen::Rng rng(80);
    const std::size_t n = 37;
    const int dim = 6;
    const auto b = random_batch(rng, n, dim);
    std::vector<double> q(n);
    mahalanobis_scalar(b.x.data(), n, n, dim, b.w.data(), b.mu.data(), q.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(q[i] == doctest::Approx(reference(b, n, dim, i)).epsilon(1e-14));
  }

  TEST_CASE("every available ISA agrees with scalar") {
    testgen::Rng rng(81);
    const auto isas = available_isas();
    REQUIRE(isas.front() == Isa::scalar);
    for (Isa isa : isas) {
      const MahalanobisFn fn = mahalanobis_for(isa);
      REQUIRE(fn != nullptr);
      for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = static_cast<std::size_t>(testgen::uniform_int(rng, 1, 41));
        const int dim = testgen::uniform_int(rng, 1, kMaxKernelDim);
        const auto b = random_batch(rng, n, dim);
        std::vector<double> want(n), got(n);
        mahalanobis_scalar(b.x.data(), n, n, dim, b.w.data(), b.mu.data(), want.data());
        fn(b.x.data(), n, n, dim, b.w.data(), b.mu.data(), got.data());
        for (std::size_t i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("stride larger than the batch length") {
    testgen::Rng rng(82);
    const std::size_t stride = 20, n = 13;
    const int dim = 4;
    auto b = random_batch(rng, stride, dim);
    for (Isa isa : available_isas()) {
      std::vector<double> q(n);
      mahalanobis_for(isa)(b.x.data(), stride, n, dim, b.w.data(), b.mu.data(), q.data());
      for (std::size_t i = 0; i < n; ++i) CHECK(q[i] == doctest::Approx(reference(b, stride, dim, i)).epsilon(1e-12));
    }
  }

  TEST_CASE("dispatch reports an available ISA") {
    const Isa active = active_isa();
    CHECK(isa_available(active));
    CHECK(isa_available(Isa::scalar));
    CHECK_FALSE(std::string(isa_name(active)).empty());
    CHECK(isa_name(Isa::scalar) == "scalar");
  }
}
