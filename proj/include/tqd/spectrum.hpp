#pragma once

#include "tqd/hamiltonian.hpp"

#include <optional>
#include <vector>

namespace tqd {

struct SpectrumReport {
  std::vector<double> transitions;      // f_{i,i+1}
  std::vector<double> anharmonicities;  // [k] = alpha_{k+1} = f_{k+1,k+2} - f_{k,k+1}
  int n_levels = 0;
  std::optional<std::vector<double>> dispersion;
};

SpectrumReport transitions_and_anharmonicities(const EigenSolution& sol);

struct ApproxTransmon {
  double f01 = 0.0;
  double alpha = 0.0;
  double ratio = 0.0;  // f01 / |alpha| = sqrt(8 E_J / E_C)
};

// Leading-order transmon expressions for f01 and alpha.
ApproxTransmon approx_f01_alpha(double e_j, double e_c);

// Levels confined in the cosine well, floor(sqrt(E_J / 2E_C)).
int n_levels(double e_j, double e_c);

/// Signed charge dispersion of the lowest levels,
/// eps_m = E_m(n_g = 1/2) - E_m(n_g = 0).
///
/// Levels are matched by ascending order at both offsets; a level whose
/// n_g = 1/2 neighbour lies closer than twice the larger of the two
/// dispersions is flagged as near-degenerate instead of being tracked.
struct DispersionTable {
  std::vector<double> epsilon;
  std::vector<bool> near_degenerate;
};

DispersionTable charge_dispersion_table(const TransmonModel& model, int levels);
double charge_dispersion_exact(const TransmonModel& model, int m);

// Asymptotic large-E_J/E_C dispersion, evaluated in log space.
double charge_dispersion_asymptotic(double e_j, double e_c, int m);
// E_J/E_C above which the asymptotic expression is meant to be used.
inline constexpr double kAsymptoticMinRatio = 20.0;

// Charge-parity beat for the m <-> m+1 transition, |eps_m| + |eps_{m+1}|.
double delta_f(const TransmonModel& model, int m);

// True when f_{i,i+1} < f_{i-1,i} for every i below `upto`.
bool transitions_decreasing(const SpectrumReport& report, int upto);

}  // namespace tqd
