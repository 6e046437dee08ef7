#include "generators.hpp"
#include "tqd/error.hpp"
#include "tqd/tomography.hpp"
#include "tqd/units.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace tqd;

TEST_SUITE("tomography") {
  TEST_CASE("gate-set size is 1 + d(d-1)") {
    CHECK(tomography_gate_set(3).size() == 7);
    CHECK(tomography_gate_set(4).size() == 13);
    CHECK(tomography_gate_set(9).size() == 73);
    for (int d = 2; d <= 12; ++d) CHECK(tomography_gate_set(d).size() == static_cast<std::size_t>(1 + d * (d - 1)));
    CHECK(tomography_gate_set(3)[0].mnemonic() == "I");
  }

  TEST_CASE("subspace rotations") {
    const auto x = subspace_unitary(4, 1, Axis::x, units::pi);
    CHECK((x.adjoint() * x - Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-12);
    CHECK(std::abs(x(2, 1) - std::complex<double>(0.0, -1.0)) < 1e-12);
    CHECK(std::abs(x(0, 0) - 1.0) < 1e-12);
    const auto y = subspace_unitary(3, 0, Axis::y, units::pi / 2);
    CHECK(y(1, 0).real() == doctest::Approx(std::sqrt(0.5)));
    CHECK(y(0, 1).real() == doctest::Approx(-std::sqrt(0.5)));
    CHECK_THROWS_AS(subspace_unitary(3, 2, Axis::x, 1.0), Error);
  }

  TEST_CASE("the last operation acts first") {
    GateSequence g;
    g.ops = {{1, Axis::x, units::pi}, {0, Axis::x, units::pi}};
    const Eigen::VectorXcd out = sequence_unitary(3, g) * Eigen::Vector3cd(1, 0, 0);
    CHECK(std::norm(out(2)) == doctest::Approx(1.0));
  }

  TEST_CASE("mnemonics round trip") {
    for (int d : {3, 5, 12}) {
      for (const auto& g : tomography_gate_set(d)) {
        const auto back = GateSequence::parse(g.mnemonic());
        REQUIRE(back.ops.size() == g.ops.size());
        for (std::size_t k = 0; k < g.ops.size(); ++k) {
          CHECK(back.ops[k].level == g.ops[k].level);
          CHECK(back.ops[k].axis == g.ops[k].axis);
          CHECK(back.ops[k].angle == doctest::Approx(g.ops[k].angle));
        }
      }
    }
    CHECK(GateSequence::parse("Y1011:45").ops[0].level == 10);
    CHECK_THROWS_AS(GateSequence::parse("Z01:90"), Error);
    CHECK_THROWS_AS(GateSequence::parse("X02:90"), Error);
    CHECK_THROWS_AS(GateSequence::parse("X01:abc"), Error);
  }

  TEST_CASE("ideal data reconstructs mixed states exactly") {
    testgen::Rng rng(100);
    for (int trial = 0; trial < 10; ++trial) {
      const int d = testgen::uniform_int(rng, 2, 8);
      const auto rho = testgen::random_density(rng, d, testgen::uniform_int(rng, 1, d));
      const auto gates = tomography_gate_set(d);
      const auto probs = ideal_probabilities(rho, gates);
      for (Eigen::Index g = 0; g < probs.rows(); ++g) CHECK(probs.row(g).sum() == doctest::Approx(1.0));
      CHECK((reconstruct_state(probs, gates) - rho).norm() < 1e-9);
    }
  }

  TEST_CASE("noisy data still gives a physical state") {
    testgen::Rng rng(101);
    for (int trial = 0; trial < 10; ++trial) {
      const int d = testgen::uniform_int(rng, 3, 9);
      const auto psi = testgen::random_state(rng, d);
      const auto gates = tomography_gate_set(d);
      Eigen::MatrixXd probs = ideal_probabilities(psi * psi.adjoint(), gates);
      for (Eigen::Index g = 0; g < probs.rows(); ++g)
        for (int i = 0; i < d; ++i) probs(g, i) += testgen::uniform(rng, -0.02, 0.02);
      const auto rho = reconstruct_state(probs, gates);
      CHECK((rho - rho.adjoint()).norm() < 1e-12);
      CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
      CHECK(es.eigenvalues().minCoeff() > -1e-10);
      CHECK(state_fidelity(rho, psi) > 0.8);
    }
  }

  TEST_CASE("an incomplete design names the unresolved elements") {
    const std::vector<GateSequence> gates{GateSequence{}};
    const Eigen::MatrixXd probs = Eigen::RowVector3d(0.5, 0.3, 0.2);
    try {
      reconstruct_state(probs, gates);
      FAIL("expected a degeneracy error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::degeneracy);
      CHECK(std::string(e.what()).find("rho") != std::string::npos);
    }
  }

  TEST_CASE("fidelity of a pure state with itself") {
    testgen::Rng rng(102);
    const auto psi = testgen::random_state(rng, 5);
    CHECK(state_fidelity(psi * psi.adjoint(), psi) == doctest::Approx(1.0));
    CHECK_THROWS_AS(state_fidelity(psi * psi.adjoint(), Eigen::VectorXcd::Zero(4)), Error);
  }
}
