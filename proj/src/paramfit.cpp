#include "tqd/paramfit.hpp"

#include "tqd/error.hpp"
#include "tqd/optimize.hpp"
#include "tqd/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

namespace tqd {

namespace {

constexpr double kMHz = 1.0e3;     // residuals are optimized in MHz
constexpr double kPenalty = 1.0e6; // residual returned for inadmissible trial points

double sign_for(int m) { return m % 2 == 1 ? 1.0 : -1.0; }  // (-1)^(m+1), m is 1-based

// theta = (log E_C, log E_J1, log|E_J2|, ..., log|E_JM|)
TransmonModel model_from(const Eigen::VectorXd& theta, int m, int cutoff) {
  TransmonModel model;
  model.e_c = std::exp(theta(0));
  model.e_j.resize(m);
  for (int k = 1; k <= m; ++k) model.e_j[k - 1] = sign_for(k) * std::exp(theta(k));
  model.cutoff = cutoff;
  model.alternating = true;
  return model;
}

struct Target {
  std::vector<double> transitions;  // f_{i,i+1}, i = 0..M
  double r0 = 0.0;
  double r1 = 0.0;
};

std::string describe(const Eigen::VectorXd& r) {
  std::ostringstream os;
  os << "[";
  for (Eigen::Index k = 0; k < r.size(); ++k) os << (k ? ", " : "") << r(k) * 1e3 << " kHz";
  os << "]";
  return os.str();
}

// f_r and g reproducing (r0, r1) for a fixed transmon, from chi at unit coupling.
std::pair<double, double> resonator_guess(const EigenSolution& sol, const Target& t, double kappa) {
  double f_r = t.r0;
  double g2 = 0.0;
  for (int pass = 0; pass < 3; ++pass) {
    const ResonatorModel unit{f_r, 1.0, kappa, std::nullopt};
    const DispersiveReport rep = stark_and_lamb(sol, unit, 2);
    const double dc = rep.chi[1] - rep.chi[0];
    g2 = dc != 0.0 ? (t.r1 - t.r0) / dc : 0.0;
    if (!(g2 > 0.0)) g2 = 1e-4;
    f_r = t.r0 - g2 * rep.chi[0];
  }
  return {f_r, std::sqrt(g2)};
}

struct Polished {
  Eigen::VectorXd x;
  Eigen::VectorXd r;
  int iterations = 0;
};

// Simplex descent on |r|^2 followed by a Levenberg-Marquardt polish.
Polished solve(const optimize::Residuals& r, const Eigen::VectorXd& x0, const Eigen::VectorXd& step) {
  optimize::NelderMeadOptions nm;
  nm.max_evaluations = 3000;
  nm.f_tolerance = 1e-12;
  nm.x_tolerance = 1e-9;
  nm.restarts = 2;
  nm.f_target = 1e-10;
  const auto simplex =
      optimize::nelder_mead([&](const Eigen::VectorXd& x) { return r(x).squaredNorm(); }, x0, step, nm);
  Polished out{simplex.x, r(simplex.x), simplex.iterations};
  try {
    const auto lm = optimize::levenberg_marquardt(r, simplex.x);
    out.iterations += lm.iterations;
    if (lm.cost < out.r.squaredNorm()) {
      out.x = lm.x;
      out.r = lm.residuals;
    }
  } catch (const Error&) {
    // keep the simplex point
  }
  return out;
}

template <class F>
optimize::Residuals guarded(F f, Eigen::Index size) {
  return [f, size](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    try {
      Eigen::VectorXd r = f(x);
      if (r.allFinite()) return r;
    } catch (const Error&) {
    }
    return Eigen::VectorXd::Constant(size, kPenalty);
  };
}

}  // namespace

void ObservationSet::validate() const {
  std::set<int> seen;
  for (const auto& [i, f] : transition_freqs) {
    if (i < 0) fail(ErrorCategory::input, "transition index must be nonnegative");
    if (!seen.insert(i).second) fail(ErrorCategory::input, "duplicate transition index " + std::to_string(i));
    if (!(f > 0.0)) fail(ErrorCategory::input, "transition frequencies must be positive");
  }
  if (resonator_freqs && !(resonator_freqs->first > 0.0 && resonator_freqs->second > 0.0))
    fail(ErrorCategory::input, "resonator frequencies must be positive");
}

int ObservationSet::count() const {
  return static_cast<int>(transition_freqs.size()) + (resonator_freqs ? 2 : 0);
}

double FitResult::max_abs_residual() const {
  double m = 0.0;
  for (double r : residuals) m = std::max(m, std::abs(r));
  return m;
}

double FitResult::squared_residual() const {
  double s = 0.0;
  for (double r : residuals) s += r * r;
  return s;
}

std::string mode_name(ResonatorFitMode mode) {
  return mode == ResonatorFitMode::joint ? "joint" : "fixed_first";
}

FitResult fit_standard(double f01, double f12, int cutoff) {
  if (!(f01 > 0.0 && f12 > 0.0)) fail(ErrorCategory::input, "transition frequencies must be positive");
  if (!(f12 < f01)) fail(ErrorCategory::input, "standard fit needs f12 < f01 (negative anharmonicity)");

  // Leading-order inversion: E_C = -alpha, E_J = (f01 + E_C)^2 / 8E_C.
  const double ec0 = f01 - f12;
  const double ej0 = (f01 + ec0) * (f01 + ec0) / (8.0 * ec0);
  const Eigen::Vector2d x0(std::log(ec0), std::log(ej0));

  auto residual = guarded(
      [&](const Eigen::VectorXd& x) {
        const TransmonModel model = model_from(x, 1, cutoff);
        const EigenSolution sol = eigensolve(model, 3);
        Eigen::VectorXd r(2);
        r << (sol.transition(0) - f01) * kMHz, (sol.transition(1) - f12) * kMHz;
        return r;
      },
      2);

  const auto lm = optimize::levenberg_marquardt(residual, x0);
  FitResult out;
  out.model = model_from(lm.x, 1, cutoff);
  out.model.alternating = false;
  out.residuals = {lm.residuals(0) / kMHz, lm.residuals(1) / kMHz};
  out.iterations = lm.iterations;
  out.mode = ResonatorFitMode::fixed_first;
  out.converged = out.max_abs_residual() < kStandardFitTolerance;
  if (!out.converged) {
    std::ostringstream os;
    os << "standard fit did not reach 1 kHz after " << lm.iterations << " iterations; best E_C = "
       << out.model.e_c << ", E_J = " << out.model.e_j[0] << ", residuals " << describe(lm.residuals / kMHz);
    fail(ErrorCategory::fit, os.str());
  }
  return out;
}

FitResult fit_harmonics(const ObservationSet& obs, int m, const HarmonicsOptions& options) {
  obs.validate();
  if (m < 1 || m > kMaxFittedTransition)
    fail(ErrorCategory::input, "harmonic order must lie in [1, " + std::to_string(kMaxFittedTransition) + "]");
  if (!obs.resonator_freqs)
    fail(ErrorCategory::arity, "harmonics fit needs both resonator frequencies f_r|0> and f_r|1>");

  Target target;
  target.transitions.assign(m + 1, std::numeric_limits<double>::quiet_NaN());
  for (const auto& [i, f] : obs.transition_freqs) {
    if (i > m) {
      std::ostringstream os;
      os << "E_J" << m << " fit uses transitions 0.." << m << " only; got index " << i;
      fail(ErrorCategory::arity, os.str());
    }
    target.transitions[i] = f;
  }
  for (int i = 0; i <= m; ++i) {
    if (std::isnan(target.transitions[i])) {
      std::ostringstream os;
      os << "E_J" << m << " fit needs the lowest " << m + 1 << " transitions; f_{" << i << "," << i + 1
         << "} is missing";
      fail(ErrorCategory::arity, os.str());
    }
  }
  target.r0 = obs.resonator_freqs->first;
  target.r1 = obs.resonator_freqs->second;

  const FitResult standard = fit_standard(target.transitions[0], target.transitions[1], options.cutoff);
  const int levels = m + 2;
  const int solve_levels = levels + 5;

  // Starting point: the standard inversion with small alternating harmonics.
  Eigen::VectorXd theta0(m + 1);
  theta0(0) = std::log(standard.model.e_c);
  theta0(1) = std::log(standard.model.e_j[0]);
  for (int k = 2; k <= m; ++k) theta0(k) = std::log(standard.model.e_j[0] * 5e-3 * std::pow(0.1, k - 2));

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  FitResult best;
  best.residuals.assign(m + 3, std::numeric_limits<double>::infinity());
  int iterations = 0;

  auto resonator_residuals = [&](const EigenSolution& sol, const ResonatorModel& res, Eigen::VectorXd& r,
                                 bool dressed) {
    const DispersiveReport rep = stark_and_lamb(sol, res, levels);
    for (int i = 0; i <= m; ++i) {
      const double f = dressed ? rep.dressed_transition(i) : sol.transition(i);
      r(i) = (f - target.transitions[i]) * kMHz;
    }
    r(m + 1) = (rep.resonator_frequency(res, 0) - target.r0) * kMHz;
    r(m + 2) = (rep.resonator_frequency(res, 1) - target.r1) * kMHz;
  };

  for (int start = 0; start < std::max(1, options.starts); ++start) {
    Eigen::VectorXd theta = theta0;
    if (start > 0) {
      theta(0) += 0.02 * normal(rng);
      theta(1) += 0.02 * normal(rng);
      for (int k = 2; k <= m; ++k) theta(k) += normal(rng);
    }
    FitResult trial;
    trial.mode = options.mode;

    if (options.mode == ResonatorFitMode::joint) {
      // x = (theta, f_r, log g)
      const EigenSolution sol0 = eigensolve(model_from(theta, m, options.cutoff), solve_levels);
      const auto [fr0, g0] = resonator_guess(sol0, target, options.kappa);
      Eigen::VectorXd x0(m + 3);
      x0.head(m + 1) = theta;
      x0(m + 1) = fr0 + (start > 0 ? 2e-4 * normal(rng) : 0.0);
      x0(m + 2) = std::log(g0) + (start > 0 ? 0.02 * normal(rng) : 0.0);
      Eigen::VectorXd step(m + 3);
      step.setConstant(0.01);
      for (int k = 2; k <= m; ++k) step(k) = 0.3;
      step(m + 1) = 1e-3;
      step(m + 2) = 0.05;

      auto r = guarded(
          [&](const Eigen::VectorXd& x) {
            const EigenSolution sol = eigensolve(model_from(x.head(m + 1), m, options.cutoff), solve_levels);
            const ResonatorModel res{x(m + 1), std::exp(x(m + 2)), options.kappa, std::nullopt};
            Eigen::VectorXd out(m + 3);
            resonator_residuals(sol, res, out, true);
            return out;
          },
          m + 3);
      const Polished p = solve(r, x0, step);
      trial.model = model_from(p.x.head(m + 1), m, options.cutoff);
      trial.resonator = ResonatorModel{p.x(m + 1), std::exp(p.x(m + 2)), options.kappa, std::nullopt};
      trial.residuals.assign(p.r.data(), p.r.data() + p.r.size());
      trial.iterations = p.iterations;
    } else {
      auto rt = guarded(
          [&](const Eigen::VectorXd& x) {
            const EigenSolution sol = eigensolve(model_from(x, m, options.cutoff), m + 2);
            Eigen::VectorXd out(m + 1);
            for (int i = 0; i <= m; ++i) out(i) = (sol.transition(i) - target.transitions[i]) * kMHz;
            return out;
          },
          m + 1);
      Eigen::VectorXd step = Eigen::VectorXd::Constant(m + 1, 0.01);
      for (int k = 2; k <= m; ++k) step(k) = 0.3;
      const Polished pt = solve(rt, theta, step);
      const TransmonModel model = model_from(pt.x, m, options.cutoff);
      const EigenSolution sol = eigensolve(model, solve_levels);
      const auto [fr0, g0] = resonator_guess(sol, target, options.kappa);

      auto rr = guarded(
          [&](const Eigen::VectorXd& x) {
            const ResonatorModel res{x(0), std::exp(x(1)), options.kappa, std::nullopt};
            const DispersiveReport rep = stark_and_lamb(sol, res, 2);
            Eigen::VectorXd out(2);
            out << (rep.resonator_frequency(res, 0) - target.r0) * kMHz,
                (rep.resonator_frequency(res, 1) - target.r1) * kMHz;
            return out;
          },
          2);
      const auto lm = optimize::levenberg_marquardt(rr, Eigen::Vector2d(fr0, std::log(g0)));
      trial.model = model;
      trial.resonator = ResonatorModel{lm.x(0), std::exp(lm.x(1)), options.kappa, std::nullopt};
      Eigen::VectorXd all(m + 3);
      resonator_residuals(sol, *trial.resonator, all, false);
      trial.residuals.assign(all.data(), all.data() + all.size());
      trial.iterations = pt.iterations + lm.iterations;
    }
    for (double& v : trial.residuals) v /= kMHz;
    iterations += trial.iterations;
    if (trial.squared_residual() < best.squared_residual()) best = trial;
    if (best.max_abs_residual() < 0.01 * kHarmonicsFitTolerance) break;
  }

  best.iterations = iterations;
  best.converged = best.max_abs_residual() < kHarmonicsFitTolerance;
  if (!best.converged) {
    std::ostringstream os;
    os << "E_J" << m << " fit stalled after " << iterations << " iterations; best E_C = " << best.model.e_c
       << ", E_J =";
    for (double e : best.model.e_j) os << " " << e;
    Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(best.residuals.data(), best.residuals.size());
    os << ", residuals " << describe(r);
    fail(ErrorCategory::fit, os.str());
  }
  return best;
}

Prediction predict_observables(const FitResult& fit, int levels) {
  if (!fit.converged) fail(ErrorCategory::input, "predictions need a converged fit");
  if (levels < 2) fail(ErrorCategory::input, "need at least two levels to predict transitions");
  const TransmonModel model = fit.model.with_cutoff(std::max(fit.model.cutoff, 2 * (levels + 6)));
  const EigenSolution sol = eigensolve(model, levels + 6);

  Prediction out;
  if (fit.resonator && fit.mode == ResonatorFitMode::joint) {
    const DispersiveReport rep = stark_and_lamb(sol, *fit.resonator, levels);
    for (int i = 0; i + 1 < levels; ++i) out.transitions.push_back(rep.dressed_transition(i));
  } else {
    for (int i = 0; i + 1 < levels; ++i) out.transitions.push_back(sol.transition(i));
  }
  const DispersionTable table = charge_dispersion_table(model, levels);
  for (int i = 0; i + 1 < levels; ++i)
    out.delta_f.push_back(std::abs(table.epsilon[i]) + std::abs(table.epsilon[i + 1]));
  return out;
}

}  // namespace tqd
