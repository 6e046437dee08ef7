#include "generators.hpp"
#include "tqd/error.hpp"
#include "tqd/spectrum.hpp"

#include <doctest.h>

#include <cmath>

using namespace tqd;

TEST_SUITE("spectrum") {
  TEST_CASE("transitions and anharmonicities of Q5") {
    const auto r = transitions_and_anharmonicities(eigensolve(TransmonModel{0.099, {32.191}}, 12));
    REQUIRE(r.transitions.size() == 11);
    REQUIRE(r.anharmonicities.size() == 10);
    CHECK(r.transitions[0] == doctest::Approx(4.94824).epsilon(2e-6));
    CHECK(r.anharmonicities[0] == doctest::Approx(r.transitions[1] - r.transitions[0]));
    CHECK(r.n_levels == 12);
    CHECK(transitions_decreasing(r, 11));
  }

  TEST_CASE("leading-order expressions approach the exact spectrum") {
    testgen::Rng rng(10);
    for (int trial = 0; trial < 20; ++trial) {
      const auto m = testgen::standard_model(rng, 60.0, 400.0);
      const auto exact = transitions_and_anharmonicities(eigensolve(m, 4));
      const auto a = approx_f01_alpha(m.e_j[0], m.e_c);
      CHECK(std::abs(a.f01 - exact.transitions[0]) < 0.25 * m.e_c);
      CHECK(std::abs(a.alpha - exact.anharmonicities[0]) < 0.2 * m.e_c);
      CHECK(a.ratio == doctest::Approx(std::sqrt(8.0 * m.e_j[0] / m.e_c)));
    }
  }

  TEST_CASE("n_levels") {
    CHECK(n_levels(32.191, 0.099) == 12);
    CHECK(n_levels(16.685, 0.190) == 6);
    CHECK(n_levels(2.0, 1.0) == 1);
    CHECK_THROWS_AS(n_levels(0.0, 0.1), Error);
  }

  TEST_CASE("transitions decrease below the confined level count") {
    testgen::Rng rng(11);
    for (int trial = 0; trial < 15; ++trial) {
      const auto m = testgen::standard_model(rng, 40.0, 300.0);
      const int n = n_levels(m.e_j[0], m.e_c);
      const auto r = transitions_and_anharmonicities(eigensolve(m, n + 1));
      CHECK(transitions_decreasing(r, n));
    }
  }

  TEST_CASE("dispersion alternates in sign and grows with level") {
    testgen::Rng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
      const auto m = testgen::standard_model(rng, 20.0, 80.0);
      const auto t = charge_dispersion_table(m, 4);
      for (int k = 0; k < 4; ++k) {
        CHECK((k % 2 == 0 ? t.epsilon[k] > 0.0 : t.epsilon[k] < 0.0));
        if (k > 0) CHECK(std::abs(t.epsilon[k]) > std::abs(t.epsilon[k - 1]));
      }
    }
  }

  TEST_CASE("dispersion is exponentially suppressed in E_J/E_C") {
    double previous = 1e9;
    for (double ratio : {20.0, 40.0, 80.0, 160.0}) {
      const double eps = std::abs(charge_dispersion_exact(TransmonModel{0.2, {0.2 * ratio}}, 1));
      CHECK(eps < previous);
      previous = eps;
    }
  }

  TEST_CASE("asymptotic dispersion tracks exact for the two lowest levels") {
    testgen::Rng rng(13);
    // Above E_J/E_C ~ 120 the exact epsilon_0 drops under double roundoff.
    for (int trial = 0; trial < 15; ++trial) {
      const auto m = testgen::standard_model(rng, kAsymptoticMinRatio, 100.0);
      for (int k = 0; k <= 1; ++k) {
        const double exact = charge_dispersion_exact(m, k);
        const double approx = charge_dispersion_asymptotic(m.e_j[0], m.e_c, k);
        CHECK(std::signbit(exact) == std::signbit(approx));
        CHECK(std::abs(approx / exact - 1.0) < (k == 0 ? 0.1 : 0.4));
      }
    }
    // The relative error shrinks as the ratio grows.
    for (int k = 0; k <= 1; ++k) {
      double previous = 1e9;
      for (double ratio : {20.0, 30.0, 50.0, 80.0}) {
        const TransmonModel m{0.2, {0.2 * ratio}};
        const double err = std::abs(charge_dispersion_asymptotic(m.e_j[0], m.e_c, k) / charge_dispersion_exact(m, k) - 1.0);
        CHECK(err < previous);
        previous = err;
      }
    }
  }

  TEST_CASE("asymptotic form stays finite deep in the transmon regime") {
    const double eps = charge_dispersion_asymptotic(1000.0, 0.1, 6);
    CHECK(std::isfinite(eps));
    CHECK(eps >= 0.0);
    CHECK(eps < 1e-100);
  }

  TEST_CASE("delta_f sums the two level dispersions") {
    const TransmonModel m{0.190, {16.685}};
    const auto t = charge_dispersion_table(m, 5);
    CHECK(delta_f(m, 3) == doctest::Approx(std::abs(t.epsilon[3]) + std::abs(t.epsilon[4])));
    // Q0 3<->4 lies in the hundreds of kHz.
    CHECK(delta_f(m, 3) > 300e-6);
    CHECK(delta_f(m, 3) < 900e-6);
  }

  TEST_CASE("Cooper-pair-box regime flags near-degenerate levels") {
    const auto t = charge_dispersion_table(TransmonModel{1.0, {0.5}, 0.0, 10}, 3);
    bool any = false;
    for (bool b : t.near_degenerate) any = any || b;
    CHECK(any);
    const auto deep = charge_dispersion_table(TransmonModel{0.1, {30.0}}, 4);
    for (bool b : deep.near_degenerate) CHECK_FALSE(b);
  }
}
