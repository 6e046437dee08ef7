#include "tqd/noise_budget.hpp"

#include "tqd/error.hpp"
#include "tqd/optimize.hpp"
#include "tqd/units.hpp"

#include <cmath>
#include <sstream>

namespace tqd {

namespace {

void check_level(const EigenSolution& sol, int i) {
  if (i < 1) fail(ErrorCategory::input, "decay rates are defined for i >= 1");
  if (i >= sol.levels()) fail(ErrorCategory::input, "level " + std::to_string(i) + " is not retained");
}

}  // namespace

void NoiseParams::validate() const {
  if (!(x_qp >= 0.0)) fail(ErrorCategory::invalid_model, "x_qp must be nonnegative");
  if (!(gap > 0.0)) fail(ErrorCategory::invalid_model, "superconducting gap must be positive");
  if (!(q_diel0 > 0.0)) fail(ErrorCategory::invalid_model, "dielectric Q0 must be positive");
  if (!std::isfinite(epsilon)) fail(ErrorCategory::invalid_model, "dielectric exponent must be finite");
  if (!(temperature > 0.0)) fail(ErrorCategory::invalid_model, "temperature must be positive");
}

double gamma_qp(const EigenSolution& sol, const NoiseParams& np, int i) {
  check_level(sol, i);
  np.validate();
  const double f = sol.transition(i - 1);
  const double f01 = sol.transition(0);
  const double element = i * sol.model().e_c / f01;
  // 8 E_J / (pi hbar) = 16 E_J/h, in 1/s for E_J/h in GHz.
  const double s_qp = np.x_qp * 16.0 * sol.model().e_j[0] * 1e9 * std::sqrt(2.0 * np.gap / units::photon_energy_ueV(f));
  return element * s_qp * 1e-6;
}

double gamma_purcell(const EigenSolution& sol, const ResonatorModel& res, int i) {
  check_level(sol, i);
  res.validate();
  const double n = sol.charge_matrix()(i - 1, i);
  const double detuning = sol.transition(i - 1) - res.f_r;
  return units::per_us(units::two_pi * res.kappa * res.g * res.g * n * n / (detuning * detuning));
}

double thermal_bracket(double f_ghz, double temperature_k) {
  const double x = units::thermal_ratio(f_ghz, temperature_k) / 2.0;
  return 1.0 + 1.0 / std::tanh(x);
}

double dielectric_q(const NoiseParams& np, double f_ghz) { return np.q_diel0 * std::pow(6.0 / f_ghz, np.epsilon); }

double gamma_dielectric(const EigenSolution& sol, const NoiseParams& np, int i) {
  check_level(sol, i);
  np.validate();
  const double f = sol.transition(i - 1);
  const double n = sol.charge_matrix()(i - 1, i);
  // 8 E_C / hbar = 8 * 2pi * E_C/h, in 1/s for E_C/h in GHz.
  const double rate = 8.0 * units::two_pi * sol.model().e_c * 1e9 * n * n / dielectric_q(np, f) *
                      thermal_bracket(f, np.temperature);
  return rate * 1e-6;
}

RateBudget total_gamma(const EigenSolution& sol, const ResonatorModel& res, const NoiseParams& np, int i) {
  RateBudget out;
  out.qp = gamma_qp(sol, np, i);
  out.purcell = gamma_purcell(sol, res, i);
  out.dielectric = gamma_dielectric(sol, np, i);
  const double detuning = std::abs(sol.transition(i - 1) - res.f_r);
  if (detuning < res.kappa) {
    std::ostringstream os;
    os << "transition " << i - 1 << "-" << i << " lies within kappa of the resonator; Purcell rate is not valid";
    out.warnings.push_back(os.str());
  }
  return out;
}

DielectricFit fit_dielectric_params(const std::vector<double>& gamma1, const EigenSolution& sol,
                                    const ResonatorModel& res, double x_qp, double gap, double temperature,
                                    const std::optional<std::vector<double>>& weights) {
  const int n = static_cast<int>(gamma1.size());
  if (n < 3) fail(ErrorCategory::input, "dielectric fit needs rates for at least three levels");
  if (n >= sol.levels()) fail(ErrorCategory::input, "eigen solution does not retain enough levels");
  if (weights && static_cast<int>(weights->size()) != n) fail(ErrorCategory::input, "one weight per level required");

  NoiseParams fixed;
  fixed.x_qp = x_qp;
  fixed.gap = gap;
  fixed.temperature = temperature;
  fixed.validate();

  std::vector<double> floor(n);
  for (int k = 0; k < n; ++k) {
    const int level = k + 1;
    if (!(gamma1[k] > 0.0)) fail(ErrorCategory::input, "measured rates must be positive");
    floor[k] = gamma_qp(sol, fixed, level) + gamma_purcell(sol, res, level);
    if (gamma1[k] <= floor[k]) {
      std::ostringstream os;
      os << "level " << level << ": measured rate " << gamma1[k] << "/us is below the fixed QP + Purcell floor "
         << floor[k] << "/us";
      fail(ErrorCategory::infeasible, os.str());
    }
  }

  // The dielectric rate is Q0^-1 (f/6)^eps times a level-dependent constant.
  std::vector<double> base(n), freq(n);
  NoiseParams unit = fixed;
  unit.q_diel0 = 1.0;
  unit.epsilon = 0.0;
  for (int k = 0; k < n; ++k) {
    base[k] = gamma_dielectric(sol, unit, k + 1);
    freq[k] = sol.transition(k);
  }
  auto residuals = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(n);
    const double q0 = std::exp(x(0));
    for (int k = 0; k < n; ++k) {
      const double model = floor[k] + base[k] / (q0 * std::pow(6.0 / freq[k], x(1)));
      r(k) = (std::log(model) - std::log(gamma1[k])) * (weights ? (*weights)[k] : 1.0);
    }
    return r;
  };
  const auto lm = optimize::levenberg_marquardt(residuals, Eigen::Vector2d(std::log(2e6), 1.0));
  DielectricFit out;
  out.q_diel0 = std::exp(lm.x(0));
  out.epsilon = lm.x(1);
  out.converged = lm.converged;
  for (int k = 0; k < n; ++k) {
    const double model = floor[k] + base[k] / (out.q_diel0 * std::pow(6.0 / freq[k], out.epsilon));
    out.log_residuals.push_back(std::log(model) - std::log(gamma1[k]));
  }
  return out;
}

}  // namespace tqd
