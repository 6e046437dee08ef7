#pragma once

#include "tqd/dispersive.hpp"
#include "tqd/hamiltonian.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tqd {

struct NoiseParams {
  double x_qp = 1e-8;        // quasiparticle density relative to Cooper pairs
  double gap = 200.0;        // superconducting gap, ueV
  double q_diel0 = 3e6;      // dielectric Q at 6 GHz
  double epsilon = 0.7;      // frequency exponent of the dielectric Q
  double temperature = 0.010;  // K

  void validate() const;

  friend bool operator==(const NoiseParams&, const NoiseParams&) = default;
};

// Rates are for the single-photon decay i -> i-1, in 1/us.
// Quasiparticle channel with |<i-1|sin(phi/2)|i>|^2 ~ i E_C / f01 and E_J1 in
// the spectral density.
double gamma_qp(const EigenSolution& sol, const NoiseParams& np, int i);
double gamma_purcell(const EigenSolution& sol, const ResonatorModel& res, int i);
double gamma_dielectric(const EigenSolution& sol, const NoiseParams& np, int i);

// 1 + coth(h f / 2 k_B T)
double thermal_bracket(double f_ghz, double temperature_k);
// Q0 (6 GHz / f)^epsilon
double dielectric_q(const NoiseParams& np, double f_ghz);

struct RateBudget {
  double qp = 0.0;
  double purcell = 0.0;
  double dielectric = 0.0;
  std::vector<std::string> warnings;

  double total() const { return qp + purcell + dielectric; }
};

RateBudget total_gamma(const EigenSolution& sol, const ResonatorModel& res, const NoiseParams& np, int i);

struct DielectricFit {
  double q_diel0 = 0.0;
  double epsilon = 0.0;
  std::vector<double> log_residuals;  // log(model) - log(measured) per level
  bool converged = false;
};

/// Fits (Q0, epsilon) in log-rate space to measured rates gamma1[k] of level
/// k+1, with the quasiparticle (x_qp, gap) and Purcell channels held fixed.
/// Set x_qp = 0 to drop the quasiparticle term. `weights` default to one.
DielectricFit fit_dielectric_params(const std::vector<double>& gamma1, const EigenSolution& sol,
                                    const ResonatorModel& res, double x_qp, double gap, double temperature,
                                    const std::optional<std::vector<double>>& weights = std::nullopt);

}  // namespace tqd
