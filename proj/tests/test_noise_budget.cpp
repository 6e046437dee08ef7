#include "generators.hpp"
#include "tqd/error.hpp"
#include "tqd/noise_budget.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace tqd;

namespace {

EigenSolution q5() { return eigensolve(TransmonModel{0.099, {32.191}}, 14); }
const ResonatorModel kRes{6.468937, 0.0281, 550e-6};

}  // namespace

TEST_SUITE("noise_budget") {
  TEST_CASE("Q5 channel limits") {
    const auto sol = q5();
    const NoiseParams np{};
    CHECK(1.0 / gamma_qp(sol, np, 1) == doctest::Approx(2195.0).epsilon(1e-3));
    CHECK(1.0 / gamma_qp(sol, np, 9) == doctest::Approx(218.8).epsilon(1e-3));
    CHECK(1.0 / gamma_purcell(sol, kRes, 1) == doctest::Approx(271.3).epsilon(1e-3));
    CHECK(1.0 / gamma_purcell(sol, kRes, 7) == doctest::Approx(95.1).epsilon(1e-3));
    CHECK(1.0 / gamma_purcell(sol, kRes, 9) == doctest::Approx(100.7).epsilon(1e-3));
    CHECK(1.0 / gamma_dielectric(sol, np, 1) == doctest::Approx(110.4).epsilon(1e-3));
    CHECK(1.0 / gamma_dielectric(sol, np, 9) == doctest::Approx(17.8).epsilon(2e-3));
  }

  TEST_CASE("rates scale with their parameters") {
    testgen::Rng rng(110);
    for (int trial = 0; trial < 10; ++trial) {
      const auto sol = eigensolve(testgen::standard_model(rng, 80.0, 350.0), 10);
      const int i = testgen::uniform_int(rng, 1, 8);
      NoiseParams np{};
      const double qp = gamma_qp(sol, np, i);
      const double diel = gamma_dielectric(sol, np, i);
      np.x_qp *= 3.0;
      np.q_diel0 *= 2.0;
      CHECK(gamma_qp(sol, np, i) == doctest::Approx(3.0 * qp));
      CHECK(gamma_dielectric(sol, np, i) == doctest::Approx(0.5 * diel));
      ResonatorModel res{sol.transition(0) + 1.5, 0.03, 5e-4};
      const double p = gamma_purcell(sol, res, i);
      res.kappa *= 2.0;
      res.g *= 2.0;
      CHECK(gamma_purcell(sol, res, i) == doctest::Approx(8.0 * p));
      CHECK(qp > 0.0);
      CHECK(p > 0.0);
      CHECK(diel > 0.0);
    }
  }

  TEST_CASE("quasiparticle rate grows linearly with level") {
    const auto sol = q5();
    const NoiseParams np{};
    // Only the sqrt(1/f) factor departs from linear growth.
    for (int i = 2; i <= 10; ++i) CHECK(gamma_qp(sol, np, i) > gamma_qp(sol, np, i - 1));
    NoiseParams off = np;
    off.x_qp = 0.0;
    CHECK(gamma_qp(sol, off, 4) == 0.0);
  }

  TEST_CASE("thermal factor and dielectric Q") {
    CHECK(thermal_bracket(5.0, 1e-4) == doctest::Approx(2.0));
    CHECK(thermal_bracket(5.0, 1.0) > 9.0);
    const NoiseParams np{};
    CHECK(dielectric_q(np, 6.0) == doctest::Approx(3e6));
    CHECK(dielectric_q(np, 3.0) == doctest::Approx(3e6 * std::pow(2.0, 0.7)));
  }

  TEST_CASE("total budget composes the channels") {
    const auto sol = q5();
    const NoiseParams np{};
    const auto b = total_gamma(sol, kRes, np, 5);
    CHECK(b.total() == doctest::Approx(gamma_qp(sol, np, 5) + gamma_purcell(sol, kRes, 5) + gamma_dielectric(sol, np, 5)));
    CHECK(b.warnings.empty());
    const ResonatorModel close{sol.transition(2) + 1e-4, 0.0281, 550e-6};
    CHECK_FALSE(total_gamma(sol, close, np, 3).warnings.empty());
    CHECK_THROWS_AS(gamma_qp(sol, np, 0), Error);
  }

  TEST_CASE("dielectric fit of the measured Q5 lifetimes") {
    const auto sol = q5();
    std::vector<double> gamma;
    for (double t : {64., 34., 24., 21., 17., 14., 13., 14., 13.}) gamma.push_back(1.0 / t);
    const auto fit = fit_dielectric_params(gamma, sol, kRes, 1e-8, 200.0, 0.010);
    CHECK(fit.q_diel0 == doctest::Approx(2.11e6).epsilon(0.01));
    CHECK(fit.epsilon == doctest::Approx(1.245).epsilon(0.01));
    CHECK(fit.log_residuals.size() == 9);
    const auto no_qp = fit_dielectric_params(gamma, sol, kRes, 0.0, 200.0, 0.010);
    CHECK(no_qp.q_diel0 == doctest::Approx(2.09e6).epsilon(0.01));
    CHECK(no_qp.epsilon == doctest::Approx(1.106).epsilon(0.01));
  }

  TEST_CASE("dielectric fit inverts synthetic rates") {
    testgen::Rng rng(111);
    const auto sol = q5();
    for (int trial = 0; trial < 5; ++trial) {
      NoiseParams np{};
      np.q_diel0 = testgen::uniform(rng, 1e6, 5e6);
      np.epsilon = testgen::uniform(rng, 0.3, 1.5);
      std::vector<double> gamma;
      for (int i = 1; i <= 9; ++i) gamma.push_back(total_gamma(sol, kRes, np, i).total());
      const auto fit = fit_dielectric_params(gamma, sol, kRes, np.x_qp, np.gap, np.temperature);
      CHECK(fit.q_diel0 == doctest::Approx(np.q_diel0).epsilon(1e-6));
      CHECK(fit.epsilon == doctest::Approx(np.epsilon).epsilon(1e-6));
      for (double r : fit.log_residuals) CHECK(std::abs(r) < 1e-8);
    }
  }

  TEST_CASE("rates below the fixed floor are infeasible") {
    const auto sol = q5();
    std::vector<double> gamma(9, 1.0 / 20.0);
    gamma[3] = 1e-5;
    try {
      fit_dielectric_params(gamma, sol, kRes, 1e-8, 200.0, 0.010);
      FAIL("expected an infeasible error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::infeasible);
      CHECK(std::string(e.what()).find("level 4") != std::string::npos);
    }
  }

  TEST_CASE("noise parameter validation") {
    NoiseParams np{};
    np.temperature = 0.0;
    CHECK_THROWS_AS(np.validate(), Error);
    np = NoiseParams{};
    np.gap = -1.0;
    CHECK_THROWS_AS(np.validate(), Error);
  }
}
