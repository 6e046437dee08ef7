#include "generators.hpp"
#include "tqd/analysis.hpp"
#include "tqd/error.hpp"
#include "tqd/units.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace tqd;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = a + (b - a) * k / (n - 1);
  return v;
}

double beat(double t, double c, double t2, double a0, double a1, double fe, double fo, double p0 = 0, double p1 = 0) {
  const double w = units::two_pi * 1e3;
  return c + std::exp(-t / t2) * (a0 * std::cos(w * fe * t + p0) + a1 * std::cos(w * fo * t + p1));
}

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

TEST_SUITE("analysis") {
  TEST_CASE("noiseless exponential is recovered exactly") {
    const auto t = linspace(0.0, 200.0, 40);
    std::vector<double> y;
    for (double x : t) y.push_back(0.9 * std::exp(-x / 64.0) + 0.05);
    const auto fit = fit_exponential(t, y);
    CHECK(fit.amplitude == doctest::Approx(0.9).epsilon(1e-8));
    CHECK(fit.constant == doctest::Approx(64.0).epsilon(1e-8));
    CHECK(fit.offset == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(fit.residual_rms < 1e-9);
  }

  TEST_CASE("exponential error bars have sensible coverage") {
    testgen::Rng rng(90);
    const auto t = linspace(0.0, 100.0, 30);
    int inside = 0;
    const int trials = 200;
    for (int trial = 0; trial < trials; ++trial) {
      const auto noise = testgen::gaussian_vector(rng, 30, 0.01);
      std::vector<double> y;
      for (std::size_t k = 0; k < t.size(); ++k) y.push_back(0.8 * std::exp(-t[k] / 25.0) + 0.1 + noise[k]);
      const auto fit = fit_exponential(t, y);
      if (std::abs(fit.constant - 25.0) <= fit.stderr_of(1)) ++inside;
    }
    const double frac = static_cast<double>(inside) / trials;
    CHECK(frac > 0.55);
    CHECK(frac < 0.80);
  }

  TEST_CASE("exponential input validation") {
    CHECK(category_of([] { fit_exponential({0, 1, 2}, {1, 0.5, 0.2}); }) == ErrorCategory::input);
    CHECK(category_of([] { fit_exponential({0, 2, 1, 3}, {1, 0.5, 0.2, 0.1}); }) == ErrorCategory::input);
    CHECK(category_of([] { fit_exponential({0, 1, 2, 3}, {0.5, 0.5, 0.5, 0.5}); }) == ErrorCategory::fit);
  }

  TEST_CASE("process infidelity") {
    CHECK(process_infidelity(0.99, 2) == doctest::Approx(0.01 * 0.75));
    CHECK(process_infidelity(1.0, 3) == 0.0);
    CHECK_THROWS_AS(process_infidelity(0.9, 1), Error);
  }

  TEST_CASE("noiseless RB decay") {
    std::vector<double> m{1, 2, 5, 10, 20, 50, 100, 200, 400};
    std::vector<double> s;
    for (double x : m) s.push_back(0.45 * std::pow(0.995, x) + 0.5);
    const auto rb = fit_rb(m, s, 2);
    CHECK(rb.decay.constant == doctest::Approx(0.995).epsilon(1e-9));
    CHECK(rb.e_f == doctest::Approx(0.005 * 0.75).epsilon(1e-6));
  }

  TEST_CASE("RB stderr tracks the scatter of repeated fits") {
    testgen::Rng rng(91);
    std::vector<double> m{1, 5, 10, 20, 40, 80, 120, 200, 300};
    std::vector<double> rs, errs;
    for (int trial = 0; trial < 60; ++trial) {
      const auto noise = testgen::gaussian_vector(rng, static_cast<int>(m.size()), 0.005);
      std::vector<double> s;
      for (std::size_t k = 0; k < m.size(); ++k) s.push_back(0.45 * std::pow(0.99, m[k]) + 0.5 + noise[k]);
      const auto rb = fit_rb(m, s);
      rs.push_back(rb.decay.constant);
      errs.push_back(rb.decay.stderr_of(1));
    }
    double mean = 0.0, var = 0.0, err = 0.0;
    for (double r : rs) mean += r / rs.size();
    for (double r : rs) var += (r - mean) * (r - mean) / (rs.size() - 1);
    for (double e : errs) err += e / errs.size();
    CHECK(std::sqrt(var) == doctest::Approx(err).epsilon(0.4));
    CHECK(std::abs(mean - 0.99) < 3.0 * err / std::sqrt(rs.size()) + 1e-5);
  }

  TEST_CASE("two-frequency Ramsey beat") {
    const auto t = linspace(0.0, 10.0, 251);
    std::vector<double> y;
    for (double x : t) y.push_back(beat(x, 0.5, 20.0, 0.25, 0.2, 0.8e-3, 1.1e-3));
    const auto fit = fit_ramsey_beat(t, y);
    CHECK(fit.f_e == doctest::Approx(0.8e-3).epsilon(1e-5));
    CHECK(fit.f_o == doctest::Approx(1.1e-3).epsilon(1e-5));
    CHECK(fit.t2r == doctest::Approx(20.0).epsilon(1e-4));
    CHECK_FALSE(fit.free_phases);
    CHECK(fit.evaluate(3.3) == doctest::Approx(beat(3.3, 0.5, 20.0, 0.25, 0.2, 0.8e-3, 1.1e-3)).epsilon(1e-6));
    CHECK(extract_delta_f({fit}) == doctest::Approx(0.3e-3).epsilon(1e-4));
  }

  TEST_CASE("beat recovery under shot noise") {
    testgen::Rng rng(92);
    const auto t = linspace(0.0, 8.0, 201);
    for (int trial = 0; trial < 5; ++trial) {
      const double fe = testgen::uniform(rng, 0.5e-3, 1.5e-3);
      const double fo = fe + testgen::uniform(rng, 0.25e-3, 0.6e-3);
      std::vector<double> y;
      for (double x : t) {
        const double p = std::clamp(beat(x, 0.5, 16.0, 0.24, 0.24, fe, fo), 0.0, 1.0);
        y.push_back(std::binomial_distribution<int>(5000, p)(rng) / 5000.0);
      }
      const auto fit = fit_ramsey_beat(t, y);
      CHECK(fit.f_e == doctest::Approx(fe).epsilon(0.02));
      CHECK(fit.f_o == doctest::Approx(fo).epsilon(0.02));
    }
  }

  TEST_CASE("wide beats free the phases") {
    const auto t = linspace(0.0, 4.0, 401);
    std::vector<double> y;
    for (double x : t) y.push_back(beat(x, 0.5, 10.0, 0.2, 0.2, 1.0e-3, 4.5e-3, 0.3, -0.4));
    const auto fit = fit_ramsey_beat(t, y);
    CHECK(fit.free_phases);
    CHECK(fit.f_e == doctest::Approx(1.0e-3).epsilon(1e-4));
    CHECK(fit.f_o == doctest::Approx(4.5e-3).epsilon(1e-4));
    CHECK(fit.residual_rms < 1e-6);
  }

  TEST_CASE("single-frequency data degenerate to one peak") {
    const auto t = linspace(0.0, 10.0, 201);
    std::vector<double> y;
    for (double x : t) y.push_back(beat(x, 0.5, 15.0, 0.45, 0.0, 1.2e-3, 1.2e-3));
    const auto fit = fit_ramsey_beat(t, y);
    CHECK_FALSE(fit.warnings.empty());
    CHECK(fit.f_e == doctest::Approx(1.2e-3).epsilon(1e-4));
    CHECK(fit.f_o == doctest::Approx(fit.f_e));
  }

  TEST_CASE("undersampled oscillation is refused") {
    const auto t = linspace(0.0, 10.0, 21);  // 1 MHz Nyquist
    std::vector<double> y;
    for (double x : t) y.push_back(beat(x, 0.5, 15.0, 0.45, 0.0, 0.97e-3, 0.97e-3));
    CHECK(category_of([&] { fit_ramsey_beat(t, y); }) == ErrorCategory::input);
  }

  TEST_CASE("normalized population and series CSV") {
    CHECK(normalized_population(0.2, 0.6) == doctest::Approx(0.25));
    CHECK_THROWS_AS(normalized_population(0.0, 0.0), Error);
    const auto path = (std::filesystem::temp_directory_path() / "tqd_series.csv").string();
    {
      std::ofstream os(path);
      os << "t_us,population\n0,1.0\n1.5,0.5\n3,0.25\n";
    }
    const auto [x, y] = read_series_csv(path);
    CHECK(x == std::vector<double>{0.0, 1.5, 3.0});
    CHECK(y == std::vector<double>{1.0, 0.5, 0.25});
    std::filesystem::remove(path);
  }
}
