#include "generators.hpp"
#include "tqd/error.hpp"
#include "tqd/hamiltonian.hpp"

#include <doctest.h>

#include <cmath>

using namespace tqd;

namespace {

TransmonModel q5() { return TransmonModel{0.099, {32.191}}; }

ErrorCategory category_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.category();
  }
  FAIL("expected tqd::Error");
  return ErrorCategory::input;
}

}  // namespace

TEST_SUITE("hamiltonian") {
  TEST_CASE("Q5 ground transition and charge matrix element") {
    const auto sol = eigensolve(q5(), 12);
    CHECK(sol.transition(0) == doctest::Approx(4.94824).epsilon(2e-6));
    const double n01 = charge_matrix_element(sol, 0, 1);
    CHECK(n01 * n01 == doctest::Approx(3.1237).epsilon(1e-4));
  }

  TEST_CASE("three-state basis matches the closed form") {
    const double ec = 0.3, ej = 2.0;
    const auto sol = eigensolve(TransmonModel{ec, {ej}, 0.0, 1}, 3);
    const double root = std::sqrt(4.0 * ec * ec + 0.5 * ej * ej);
    CHECK(sol.energy(0) == doctest::Approx(2.0 * ec - root));
    CHECK(sol.energy(1) == doctest::Approx(4.0 * ec));
    CHECK(sol.energy(2) == doctest::Approx(2.0 * ec + root));
  }

  TEST_CASE("E_J = 0 reduces to the charge parabola") {
    const TransmonModel m{0.2, {0.0}, 0.3, 6};
    const auto sol = eigensolve(m, 4);
    // Sorted values of 4 E_C (n - 0.3)^2 for n = 0, 1, -1, 2.
    const double expect[] = {0.2 * 4 * 0.09, 0.2 * 4 * 0.49, 0.2 * 4 * 1.69, 0.2 * 4 * 2.89};
    for (int i = 0; i < 4; ++i) CHECK(sol.energy(i) == doctest::Approx(expect[i]).epsilon(1e-12));
  }

  TEST_CASE("hamiltonian is symmetric with the charging diagonal") {
    testgen::Rng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
      auto m = testgen::harmonic_model(rng, testgen::uniform_int(rng, 1, 4));
      m.n_g = testgen::uniform(rng, -0.5, 0.5);
      const auto h = build_hamiltonian(m);
      CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
      for (int k = 0; k < m.dimension(); ++k) {
        const double q = k - m.cutoff - m.n_g;
        CHECK(h(k, k) == doctest::Approx(4.0 * m.e_c * q * q));
      }
      CHECK(h(0, m.harmonics()) == doctest::Approx(-0.5 * m.e_j.back()));
    }
  }

  TEST_CASE("eigenvectors: ascending energies, orthonormal, sign convention") {
    testgen::Rng rng(2);
    for (int trial = 0; trial < 15; ++trial) {
      const auto m = testgen::harmonic_model(rng, testgen::uniform_int(rng, 1, 3));
      const auto sol = eigensolve(m, 8);
      for (int i = 0; i + 1 < sol.levels(); ++i) CHECK(sol.energy(i) < sol.energy(i + 1));
      const Eigen::MatrixXd gram = sol.vectors().transpose() * sol.vectors();
      CHECK((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
      for (int c = 0; c < sol.levels(); ++c) {
        Eigen::Index arg;
        sol.vectors().col(c).cwiseAbs().maxCoeff(&arg);
        CHECK(sol.vectors()(arg, c) > 0.0);
      }
    }
  }

  TEST_CASE("parity at zero offset: n couples only neighbouring parities") {
    testgen::Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
      const auto sol = eigensolve(testgen::standard_model(rng), 8);
      const auto& n = sol.charge_matrix();
      CHECK((n - n.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      for (int i = 0; i < 8; ++i)
        for (int j = i; j < 8; j += 2) CHECK(std::abs(n(i, j)) < 1e-9);
    }
    // Deep in the well neighbouring elements grow roughly like sqrt(i+1).
    for (int trial = 0; trial < 5; ++trial) {
      const auto sol = eigensolve(testgen::standard_model(rng, 150.0, 400.0), 8);
      const auto& n = sol.charge_matrix();
      for (int i = 0; i + 2 < 6; ++i) CHECK(std::abs(n(i + 1, i + 2)) > std::abs(n(i, i + 1)));
    }
  }

  TEST_CASE("offset symmetries: n_g -> -n_g and n_g -> n_g + 1") {
    testgen::Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
      auto m = testgen::standard_model(rng, 2.0, 20.0);
      m.cutoff = 25;
      const double ng = testgen::uniform(rng, 0.0, 0.5);
      const auto a = eigensolve(m.with_offset(ng), 5);
      const auto b = eigensolve(m.with_offset(-ng), 5);
      const auto c = eigensolve(m.with_offset(ng + 1.0), 5);
      CHECK((a.energies() - b.energies()).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((a.energies() - c.energies()).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  TEST_CASE("convergence_check returns a cutoff that holds") {
    const int n = convergence_check(q5(), 12, 1e-6);
    CHECK(n >= 6);
    CHECK(n <= 40);
    const auto a = eigensolve(q5().with_cutoff(n), 12);
    const auto b = eigensolve(q5().with_cutoff(n + 30), 12);
    CHECK((a.energies() - b.energies()).cwiseAbs().maxCoeff() < 1e-6);
  }

  TEST_CASE("invalid models are rejected with invalid_model") {
    CHECK(category_of([] { TransmonModel{0.0, {10.0}}.validate(); }) == ErrorCategory::invalid_model);
    CHECK(category_of([] { TransmonModel{0.1, {}}.validate(); }) == ErrorCategory::invalid_model);
    CHECK(category_of([] { TransmonModel{0.1, {-1.0}}.validate(); }) == ErrorCategory::invalid_model);
    CHECK(category_of([] { TransmonModel{0.1, {10.0}, 0.0, 0}.validate(); }) == ErrorCategory::invalid_model);
    TransmonModel alt{0.1, {30.0, 0.2}};
    alt.alternating = true;
    CHECK(category_of([&] { alt.validate(); }) == ErrorCategory::invalid_model);
    alt.alternating = false;
    CHECK_NOTHROW(alt.validate());
    CHECK(category_of([] { build_hamiltonian(TransmonModel{0.1, {30.0, -0.1, 0.01}, 0.0, 2}); }) ==
          ErrorCategory::invalid_model);
    CHECK(category_of([] { TransmonModel{0.1, {30.0}, 0.0, 10}.require_levels(6); }) ==
          ErrorCategory::invalid_model);
    CHECK(category_of([] { eigensolve(TransmonModel{0.1, {30.0}, 0.0, 2}, 6); }) == ErrorCategory::input);
  }

  TEST_CASE("energy() and charge_matrix_element() bounds") {
    const auto sol = eigensolve(q5(), 4);
    CHECK(category_of([&] { sol.energy(4); }) == ErrorCategory::input);
    CHECK(category_of([&] { charge_matrix_element(sol, -1, 0); }) == ErrorCategory::input);
  }
}
