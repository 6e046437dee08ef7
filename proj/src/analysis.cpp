#include "tqd/analysis.hpp"

#include "tqd/error.hpp"
#include "tqd/optimize.hpp"
#include "tqd/units.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numeric>
#include <sstream>

namespace tqd {

namespace {

void check_series(const std::vector<double>& t, const std::vector<double>& y, std::size_t min_points,
                  const char* what) {
  if (t.size() != y.size()) fail(ErrorCategory::input, std::string(what) + ": x and y lengths differ");
  if (t.size() < min_points) {
    std::ostringstream os;
    os << what << ": need at least " << min_points << " points, got " << t.size();
    fail(ErrorCategory::input, os.str());
  }
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!std::isfinite(t[k]) || !std::isfinite(y[k])) fail(ErrorCategory::input, std::string(what) + ": non-finite data");
    if (k > 0 && !(t[k] > t[k - 1])) fail(ErrorCategory::input, std::string(what) + ": x must be strictly ascending");
  }
}

// Best (A, C) for a fixed time constant, and the resulting squared error.
std::pair<Eigen::Vector2d, double> linear_amplitudes(const std::vector<double>& t, const std::vector<double>& y,
                                                     double tau) {
  const Eigen::Index n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    a(k, 0) = std::exp(-(t[k] - t[0]) / tau);
    a(k, 1) = 1.0;
    b(k) = y[k];
  }
  const Eigen::Vector2d x = a.colPivHouseholderQr().solve(b);
  return {x, (a * x - b).squaredNorm()};
}

// Log-linear estimate of tau with the last point as baseline.
double log_linear_tau(const std::vector<double>& t, const std::vector<double>& y) {
  const double c = y.back();
  const double sign = y.front() > c ? 1.0 : -1.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double d = sign * (y[k] - c);
    if (d <= 0.0) continue;
    const double ly = std::log(d);
    sx += t[k];
    sy += ly;
    sxx += t[k] * t[k];
    sxy += t[k] * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return slope < 0.0 ? -1.0 / slope : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

DecayFit fit_exponential(const std::vector<double>& times, const std::vector<double>& values) {
  check_series(times, values, 4, "exponential fit");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double scale = std::max(1.0, std::max(std::abs(*lo), std::abs(*hi)));
  if (*hi - *lo <= 1e-12 * scale) fail(ErrorCategory::fit, "exponential fit: data show no decay");

  const double span = times.back() - times.front();
  double tau0 = log_linear_tau(times, values);
  double best = std::isfinite(tau0) ? linear_amplitudes(times, values, tau0).second
                                    : std::numeric_limits<double>::infinity();
  // Coarse scan guards against a poor log-linear start (noisy or offset-heavy data).
  for (int k = -20; k <= 20; ++k) {
    const double tau = span * std::pow(10.0, k / 10.0);
    const double sse = linear_amplitudes(times, values, tau).second;
    if (sse < best) {
      best = sse;
      tau0 = tau;
    }
  }
  const Eigen::Vector2d ac = linear_amplitudes(times, values, tau0).first;
  const double t0 = times.front();
  const Eigen::Vector3d x0(ac(0), std::log(tau0), ac(1));

  auto residuals = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(times.size()));
    const double tau = std::exp(x(1));
    for (std::size_t k = 0; k < times.size(); ++k)
      r(static_cast<Eigen::Index>(k)) = x(0) * std::exp(-(times[k] - t0) / tau) + x(2) - values[k];
    return r;
  };
  const auto lm = optimize::levenberg_marquardt(residuals, x0);
  const double tau = std::exp(lm.x(1));
  if (!std::isfinite(tau) || tau > 1e3 * span || lm.x(0) == 0.0)
    fail(ErrorCategory::fit, "exponential fit: no decay resolved within the sampled window");

  DecayFit out;
  // Report A at t = 0 rather than at the first sample.
  const double shift = std::exp(t0 / tau);
  out.amplitude = lm.x(0) * shift;
  out.constant = tau;
  out.offset = lm.x(2);
  const Eigen::Matrix3d j = Eigen::Vector3d(shift, tau, 1.0).asDiagonal();
  out.covariance = j * lm.covariance() * j.transpose();
  out.residual_rms = std::sqrt(lm.cost / static_cast<double>(times.size()));
  return out;
}

double process_infidelity(double r, int d) {
  if (d < 2) fail(ErrorCategory::input, "subspace dimension must be at least 2");
  return (1.0 - r) * (1.0 - 1.0 / (static_cast<double>(d) * d));
}

RbFit fit_rb(const std::vector<double>& depths, const std::vector<double>& survival, int d_subspace) {
  check_series(depths, survival, 4, "RB fit");
  const DecayFit e = fit_exponential(depths, survival);
  const double tau = e.constant;
  const double r = std::exp(-1.0 / tau);
  if (!(r > 0.0 && r <= 1.0)) fail(ErrorCategory::fit, "RB fit: decay parameter outside (0, 1]");
  RbFit out;
  out.decay = e;
  out.decay.constant = r;
  // A e^{-m/tau} = A r^m, so only the middle parameter changes: dr/dtau = r / tau^2.
  const Eigen::Matrix3d j = Eigen::Vector3d(1.0, r / (tau * tau), 1.0).asDiagonal();
  out.decay.covariance = j * e.covariance * j.transpose();
  out.e_f = process_infidelity(r, d_subspace);
  out.e_f_stderr = out.decay.stderr_of(1) * (1.0 - 1.0 / (static_cast<double>(d_subspace) * d_subspace));
  return out;
}

double RamseyBeatFit::evaluate(double t_us) const {
  const double w = units::two_pi * 1.0e3;  // GHz * us -> rad
  return c + std::exp(-t_us / t2r) * (a0 * std::cos(w * f_e * t_us + phi0) + a1 * std::cos(w * f_o * t_us + phi1));
}

namespace {

struct Peak {
  double f;  // MHz
  double power;
};

std::vector<Peak> periodogram_peaks(const std::vector<double>& t, const std::vector<double>& y, double f_max,
                                    double df) {
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  std::vector<double> freqs, power;
  for (double f = 0.0; f <= f_max; f += df) {
    std::complex<double> s = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k)
      s += (y[k] - mean) * std::polar(1.0, -units::two_pi * f * t[k]);
    freqs.push_back(f);
    power.push_back(std::norm(s));
  }
  std::vector<Peak> peaks;
  for (std::size_t k = 1; k + 1 < power.size(); ++k)
    if (power[k] > power[k - 1] && power[k] >= power[k + 1]) peaks.push_back({freqs[k], power[k]});
  // A line at the top of the band still rises into the last bin.
  if (power.size() >= 2 && power.back() > power[power.size() - 2]) peaks.push_back({freqs.back(), power.back()});
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.power > b.power; });
  return peaks;
}

// Model in MHz / us. Layout: (C, log T, A0, A1, fe, fo[, phi0, phi1]).
double beat_model(const Eigen::VectorXd& p, double t, bool phases) {
  const double env = std::exp(-t / std::exp(p(1)));
  const double ph0 = phases ? p(6) : 0.0;
  const double ph1 = phases ? p(7) : 0.0;
  return p(0) + env * (p(2) * std::cos(units::two_pi * p(4) * t + ph0) + p(3) * std::cos(units::two_pi * p(5) * t + ph1));
}

}  // namespace

RamseyBeatFit fit_ramsey_beat(const std::vector<double>& times, const std::vector<double>& populations) {
  check_series(times, populations, 8, "Ramsey fit");
  const double span = times.back() - times.front();
  const double mean_dt = span / static_cast<double>(times.size() - 1);
  const double nyquist = 0.5 / mean_dt;  // MHz
  const double resolution = 1.0 / span;

  const auto peaks = periodogram_peaks(times, populations, nyquist, resolution / 8.0);
  if (peaks.empty()) fail(ErrorCategory::fit, "Ramsey fit: no oscillation found");
  if (peaks.front().f > 0.9 * nyquist)
    fail(ErrorCategory::input, "Ramsey fit: dominant frequency is not resolved by the sampling (Nyquist)");

  RamseyBeatFit out;
  const Peak main = peaks.front();
  const Peak* second = nullptr;
  for (const Peak& p : peaks)
    if (std::abs(p.f - main.f) > 1.5 * resolution && p.power > 0.1 * main.power && p.f < 0.9 * nyquist) {
      second = &p;
      break;
    }

  const Eigen::Index n = static_cast<Eigen::Index>(times.size());
  const std::vector<double>& rel = times;

  auto seed_linear = [&](double fe, double fo, bool two) {
    // Scan T2R and solve the linear amplitudes at each value.
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd seed(6);
    for (int k = -10; k <= 10; ++k) {
      const double tau = span * std::pow(10.0, k / 10.0);
      Eigen::MatrixXd a(n, two ? 3 : 2);
      Eigen::VectorXd b(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double env = std::exp(-rel[i] / tau);
        a(i, 0) = 1.0;
        a(i, 1) = env * std::cos(units::two_pi * fe * rel[i]);
        if (two) a(i, 2) = env * std::cos(units::two_pi * fo * rel[i]);
        b(i) = populations[i];
      }
      const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
      const double sse = (a * x - b).squaredNorm();
      if (sse < best) {
        best = sse;
        seed << x(0), std::log(tau), x(1), two ? x(2) : 0.0, fe, fo;
      }
    }
    return seed;
  };

  auto run = [&](const Eigen::VectorXd& start, bool two, bool phases) {
    const int size = two ? (phases ? 8 : 6) : (phases ? 5 : 4);
    // Single-tone layout packs (C, log T, A0, f[, phi0]) and is expanded on the fly.
    auto expand = [two, phases](const Eigen::VectorXd& x) {
      if (two) return Eigen::VectorXd(x);
      Eigen::VectorXd p = Eigen::VectorXd::Zero(phases ? 8 : 6);
      p(0) = x(0);
      p(1) = x(1);
      p(2) = x(2);
      p(4) = x(3);
      p(5) = x(3);
      if (phases) p(6) = x(4);
      return p;
    };
    auto residuals = [&](const Eigen::VectorXd& x) {
      const Eigen::VectorXd p = expand(x);
      Eigen::VectorXd r(n);
      for (Eigen::Index i = 0; i < n; ++i) r(i) = beat_model(p, rel[i], phases) - populations[i];
      return r;
    };
    Eigen::VectorXd x0(size);
    if (two) {
      x0.head(6) = start.head(6);
      if (phases) x0.tail(2) = start.size() >= 8 ? Eigen::VectorXd(start.tail(2)) : Eigen::VectorXd::Zero(2);
    } else {
      x0 << start(0), start(1), start(2), start(4);
      if (phases) x0(4) = start.size() >= 8 ? start(6) : 0.0;
    }
    const auto lm = optimize::levenberg_marquardt(residuals, x0);
    return std::make_pair(expand(lm.x), std::sqrt(lm.cost / static_cast<double>(n)));
  };

  const bool two = second != nullptr;
  double fe = main.f, fo = main.f;
  if (two) {
    fe = std::min(main.f, second->f);
    fo = std::max(main.f, second->f);
  } else {
    out.warnings.push_back("single-peak spectrum: degenerate beat, f_e = f_o");
  }
  bool phases = two && (fo - fe) * 1e-3 > kFreePhaseThreshold;
  auto [p, rms] = run(seed_linear(fe, fo, two), two, phases);
  if (two && (std::abs(p(5) - p(4)) * 1e-3 > kFreePhaseThreshold) != phases) {
    // The fitted splitting crossed the threshold; refit under the other rule.
    phases = !phases;
    auto refit = run(p, two, phases);
    p = refit.first;
    rms = refit.second;
  }

  out.c = p(0);
  out.t2r = std::exp(p(1));
  out.a0 = p(2);
  out.a1 = p(3);
  out.f_e = std::abs(p(4)) * 1e-3;
  out.f_o = std::abs(p(5)) * 1e-3;
  out.free_phases = phases;
  if (phases) {
    out.phi0 = p(6);
    out.phi1 = p(7);
  }
  if (out.f_e > out.f_o) {
    std::swap(out.f_e, out.f_o);
    std::swap(out.a0, out.a1);
    std::swap(out.phi0, out.phi1);
  }
  out.residual_rms = rms;
  if (!(out.t2r > 0.0) || !std::isfinite(out.t2r)) fail(ErrorCategory::fit, "Ramsey fit: T2R did not converge");
  return out;
}

double extract_delta_f(const std::vector<RamseyBeatFit>& fits) {
  if (fits.empty()) fail(ErrorCategory::input, "need at least one Ramsey fit");
  double best = 0.0;
  for (const auto& f : fits) best = std::max(best, std::abs(f.f_o - f.f_e));
  return best;
}

double normalized_population(double p_lower, double p_upper) {
  const double total = p_lower + p_upper;
  if (!(total > 0.0)) fail(ErrorCategory::input, "normalized population needs P_i + P_{i+1} > 0");
  return p_lower / total;
}

std::pair<std::vector<double>, std::vector<double>> read_series_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCategory::input, "cannot read " + path);
  std::vector<double> x, y;
  std::string line;
  int row = 0;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double a = 0.0, b = 0.0;
    if (!(ss >> a >> b)) {
      if (row == 1) continue;  // header
      fail(ErrorCategory::input, path + ": row " + std::to_string(row) + " is not two numbers");
    }
    x.push_back(a);
    y.push_back(b);
  }
  return {x, y};
}

}  // namespace tqd
