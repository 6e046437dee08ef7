#include "tqd/spectrum.hpp"

#include "tqd/error.hpp"

#include <cmath>
#include <numbers>

namespace tqd {

SpectrumReport transitions_and_anharmonicities(const EigenSolution& sol) {
  if (sol.levels() < 3) fail(ErrorCategory::input, "need at least 3 levels for anharmonicities");
  SpectrumReport r;
  for (int i = 0; i + 1 < sol.levels(); ++i) r.transitions.push_back(sol.transition(i));
  for (std::size_t i = 0; i + 1 < r.transitions.size(); ++i) {
    r.anharmonicities.push_back(r.transitions[i + 1] - r.transitions[i]);
  }
  const auto& m = sol.model();
  r.n_levels = m.e_j[0] > 0.0 ? n_levels(m.e_j[0], m.e_c) : 0;
  return r;
}

ApproxTransmon approx_f01_alpha(double e_j, double e_c) {
  if (!(e_j > 0.0) || !(e_c > 0.0)) fail(ErrorCategory::input, "E_J and E_C must be positive");
  ApproxTransmon a;
  a.f01 = std::sqrt(8.0 * e_j * e_c) - e_c;
  a.alpha = -e_c;
  a.ratio = std::sqrt(8.0 * e_j / e_c);
  return a;
}

int n_levels(double e_j, double e_c) {
  if (!(e_j > 0.0) || !(e_c > 0.0)) fail(ErrorCategory::input, "E_J and E_C must be positive");
  return static_cast<int>(std::floor(std::sqrt(e_j / (2.0 * e_c))));
}

DispersionTable charge_dispersion_table(const TransmonModel& model, int levels) {
  // One extra level so the top requested one has a neighbour to compare to.
  const int solve = std::min(levels + 1, model.dimension());
  const auto even = eigensolve(model.with_offset(0.0), solve);
  const auto half = eigensolve(model.with_offset(0.5), solve);
  DispersionTable t;
  for (int m = 0; m < levels; ++m) t.epsilon.push_back(half.energy(m) - even.energy(m));
  for (int m = 0; m < levels; ++m) {
    bool flag = false;
    for (int nb : {m - 1, m + 1}) {
      if (nb < 0 || nb >= solve) continue;
      const double gap = std::abs(half.energy(nb) - half.energy(m));
      double scale = std::abs(t.epsilon[m]);
      if (nb < levels) scale = std::max(scale, std::abs(t.epsilon[nb]));
      if (gap < 2.0 * scale) flag = true;
    }
    t.near_degenerate.push_back(flag);
  }
  return t;
}

double charge_dispersion_exact(const TransmonModel& model, int m) {
  if (m < 0) fail(ErrorCategory::input, "level index must be non-negative");
  return charge_dispersion_table(model, m + 1).epsilon[m];
}

double charge_dispersion_asymptotic(double e_j, double e_c, int m) {
  if (!(e_j > 0.0) || !(e_c > 0.0)) fail(ErrorCategory::input, "E_J and E_C must be positive");
  if (m < 0) fail(ErrorCategory::input, "level index must be non-negative");
  const double md = static_cast<double>(m);
  const double log_mag = std::log(e_c) + (4.0 * md + 5.0) * std::numbers::ln2 - std::lgamma(md + 1.0) +
                         0.5 * std::log(2.0 / std::numbers::pi) +
                         (0.5 * md + 0.75) * std::log(e_j / (2.0 * e_c)) - std::sqrt(8.0 * e_j / e_c);
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  return sign * std::exp(log_mag);
}

double delta_f(const TransmonModel& model, int m) {
  if (m < 0) fail(ErrorCategory::input, "transition index must be non-negative");
  const auto t = charge_dispersion_table(model, m + 2);
  return std::abs(t.epsilon[m]) + std::abs(t.epsilon[m + 1]);
}

bool transitions_decreasing(const SpectrumReport& report, int upto) {
  for (int i = 1; i < upto && i < static_cast<int>(report.transitions.size()); ++i) {
    if (!(report.transitions[i] < report.transitions[i - 1])) return false;
  }
  return true;
}

}  // namespace tqd
