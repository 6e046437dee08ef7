#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace tqd {

/// A exp(-t/T) + C (constant = T in us) or A r^m + C (constant = r).
struct DecayFit {
  double amplitude = 0.0;
  double constant = 0.0;
  double offset = 0.0;
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();  // (A, constant, C)
  double residual_rms = 0.0;

  double stderr_of(int k) const { return std::sqrt(std::max(0.0, covariance(k, k))); }
};

DecayFit fit_exponential(const std::vector<double>& times, const std::vector<double>& values);

struct RbFit {
  DecayFit decay;  // constant = r per Clifford
  double e_f = 0.0;
  double e_f_stderr = 0.0;
};

// e_f = (1 - r)(1 - 1/d^2)
double process_infidelity(double r, int d);
RbFit fit_rb(const std::vector<double>& depths, const std::vector<double>& survival, int d_subspace = 2);

/// C + exp(-t/T2R) [A0 cos(2 pi f_e t + phi0) + A1 cos(2 pi f_o t + phi1)], f_e <= f_o.
struct RamseyBeatFit {
  double c = 0.0;
  double t2r = 0.0;  // us
  double a0 = 0.0;
  double a1 = 0.0;
  double f_e = 0.0;  // GHz
  double f_o = 0.0;  // GHz
  double phi0 = 0.0;
  double phi1 = 0.0;
  bool free_phases = false;
  double residual_rms = 0.0;
  std::vector<std::string> warnings;

  double evaluate(double t_us) const;
};

// Phases stay at zero unless the two frequencies differ by more than this.
inline constexpr double kFreePhaseThreshold = 2.0e-3;  // GHz

RamseyBeatFit fit_ramsey_beat(const std::vector<double>& times, const std::vector<double>& populations);

// max |f_o - f_e| over repeated fits, GHz.
double extract_delta_f(const std::vector<RamseyBeatFit>& fits);

// P_i / (P_i + P_{i+1})
double normalized_population(double p_lower, double p_upper);

// Two numeric columns; a non-numeric first line is taken as a header.
std::pair<std::vector<double>, std::vector<double>> read_series_csv(const std::string& path);

}  // namespace tqd
