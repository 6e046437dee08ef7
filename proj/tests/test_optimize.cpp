#include "generators.hpp"
#include "tqd/error.hpp"
#include "tqd/optimize.hpp"

#include <doctest.h>

#include <cmath>

using namespace tqd;
using namespace tqd::optimize;

TEST_SUITE("optimize") {
  TEST_CASE("Nelder-Mead finds the Rosenbrock minimum") {
    const Objective rosen = [](const Eigen::VectorXd& x) {
      return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    const auto r = nelder_mead(rosen, Eigen::Vector2d(-1.2, 1.0), Eigen::Vector2d(0.5, 0.5));
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(r.value < 1e-10);
  }

  TEST_CASE("Nelder-Mead on random convex quadratics") {
    testgen::Rng rng(30);
    for (int trial = 0; trial < 10; ++trial) {
      const int n = testgen::uniform_int(rng, 2, 5);
      const Eigen::MatrixXd a = testgen::random_spd(rng, n);
      Eigen::VectorXd c(n);
      for (int i = 0; i < n; ++i) c[i] = testgen::uniform(rng, -2.0, 2.0);
      const Objective f = [&](const Eigen::VectorXd& x) { return (x - c).dot(a * (x - c)); };
      const auto r = nelder_mead(f, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Constant(n, 0.5));
      CHECK((r.x - c).norm() < 1e-4);
    }
  }

  TEST_CASE("f_target stops early") {
    const Objective f = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
    NelderMeadOptions opt;
    opt.f_target = 1e-2;
    const auto r = nelder_mead(f, Eigen::Vector2d(3.0, -2.0), Eigen::Vector2d(1.0, 1.0), opt);
    CHECK(r.value <= 1e-2);
    CHECK(r.evaluations < 200);
  }

  TEST_CASE("Levenberg-Marquardt recovers exponential parameters and covariance") {
    testgen::Rng rng(31);
    std::vector<double> t, y;
    const double sigma = 0.01;
    const auto noise = testgen::gaussian_vector(rng, 60, sigma);
    for (int k = 0; k < 60; ++k) {
      t.push_back(0.1 * k);
      y.push_back(2.0 * std::exp(-t.back() / 1.5) + 0.3 + noise[k]);
    }
    const Residuals r = [&](const Eigen::VectorXd& p) {
      Eigen::VectorXd out(t.size());
      for (std::size_t k = 0; k < t.size(); ++k) out[k] = p[0] * std::exp(-t[k] / p[1]) + p[2] - y[k];
      return out;
    };
    const auto fit = levenberg_marquardt(r, Eigen::Vector3d(1.0, 1.0, 0.0));
    CHECK(fit.converged);
    const Eigen::MatrixXd cov = fit.covariance();
    CHECK(std::abs(fit.x[0] - 2.0) < 4.0 * std::sqrt(cov(0, 0)));
    CHECK(std::abs(fit.x[1] - 1.5) < 4.0 * std::sqrt(cov(1, 1)));
    CHECK(std::sqrt(fit.cost / (60 - 3)) == doctest::Approx(sigma).epsilon(0.25));
  }

  TEST_CASE("numeric Jacobian of a linear map is exact") {
    Eigen::MatrixXd a(3, 2);
    a << 1, 2, -3, 4, 0.5, -1;
    const Residuals r = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x; };
    const Eigen::VectorXd x(Eigen::Vector2d(0.3, -0.7));
    const auto j = numeric_jacobian(r, x, r(x), 1e-6);
    CHECK((j - a).cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("bracketed root") {
    const double root = find_root([](double x) { return x * x * x - 2.0; }, 0.0, 3.0, 1e-14);
    CHECK(root == doctest::Approx(std::cbrt(2.0)).epsilon(1e-12));
    try {
      find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-10);
      FAIL("expected a fit error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::fit);
    }
  }
}
