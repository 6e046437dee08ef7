#pragma once

#include "tqd/dispersive.hpp"
#include "tqd/hamiltonian.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tqd {

struct ObservationSet {
  std::vector<std::pair<int, double>> transition_freqs;         // (i, f_{i,i+1}) GHz
  std::optional<std::pair<double, double>> resonator_freqs;     // (f_r|0>, f_r|1>) GHz

  void validate() const;
  int count() const;
};

/// How the resonator enters a harmonics fit.
///
/// `joint` fits (E_C, E_J1..E_JM, f_r, g) together and compares measured
/// transitions with Lamb-shifted ones. `fixed_first` fits the transmon to
/// bare transitions, then solves f_r and g with the transmon held fixed.
enum class ResonatorFitMode { joint, fixed_first };

struct FitResult {
  TransmonModel model;
  std::optional<ResonatorModel> resonator;
  std::vector<double> residuals;  // model - measured, GHz; transitions first, then f_r|0>, f_r|1>
  bool converged = false;
  int iterations = 0;
  ResonatorFitMode mode = ResonatorFitMode::joint;

  double max_abs_residual() const;
  double squared_residual() const;
};

inline constexpr double kStandardFitTolerance = 1.0e-6;   // 1 kHz
inline constexpr double kHarmonicsFitTolerance = 1.0e-5;  // 10 kHz
inline constexpr int kMaxFittedTransition = 8;            // f_{8,9} is the highest one used

// E_J and E_C reproducing f01 and f12 by exact diagonalization.
FitResult fit_standard(double f01, double f12, int cutoff = kDefaultCutoff);

struct HarmonicsOptions {
  ResonatorFitMode mode = ResonatorFitMode::joint;
  int starts = 6;
  std::uint64_t seed = 20240611;
  double kappa = 550e-6;  // carried into the fitted resonator; not constrained by the data
  int cutoff = kDefaultCutoff;
};

// Fits the M-harmonic model with alternating signs to the lowest M+1
// transitions plus both resonator frequencies. Requires 1 <= M <= 8.
FitResult fit_harmonics(const ObservationSet& obs, int m, const HarmonicsOptions& options = {});

struct Prediction {
  std::vector<double> transitions;  // f_{i,i+1}, same convention as the fit
  std::vector<double> delta_f;      // |eps_i| + |eps_{i+1}|
};

Prediction predict_observables(const FitResult& fit, int levels);

std::string mode_name(ResonatorFitMode mode);

}  // namespace tqd
