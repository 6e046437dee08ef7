#include "tqd/readout.hpp"

#include "tqd/error.hpp"
#include "tqd/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace tqd {

namespace {

constexpr cplx I{0.0, 1.0};

cplx angular(cplx f_ghz) { return units::two_pi * 1.0e3 * f_ghz; }

// phi1(z) = (e^z - 1) / z, with its Taylor series near zero.
cplx phi1(cplx z) {
  if (std::abs(z) < 1e-2) {
    cplx term = 1.0;
    cplx sum = 1.0;
    for (int k = 2; k < 12; ++k) {
      term *= z / static_cast<double>(k);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

// Integral of e^{-i a (t - t0)} over t in [t0, t0 + s].
cplx exp_integral(cplx a, double s) { return s * phi1(-I * a * s); }

struct Frame {
  std::vector<cplx> c;      // particular-solution amplitudes
  std::vector<double> dd;   // omega_d - omega_m
  cplx delta;               // omega_bar - omega_m
};

Frame frame(cplx pulled, const ToneSet& tones, int m) {
  if (m < 0 || m >= tones.size()) fail(ErrorCategory::input, "demodulation index out of range");
  const cplx wbar = angular(pulled);
  const double wm = units::angular_per_us(tones.demod_freqs[m]);
  Frame f;
  f.delta = wbar - wm;
  for (const Tone& t : tones.tones) {
    const double wd = units::angular_per_us(t.f_d);
    const double omega = units::angular_per_us(t.amplitude);
    f.c.push_back(-(omega / 2.0) * std::exp(-I * t.phase) / (wbar - wd));
    f.dd.push_back(wd - wm);
  }
  return f;
}

}  // namespace

void ToneSet::validate() const {
  if (tones.empty()) fail(ErrorCategory::input, "tone set is empty");
  if (demod_freqs.size() != tones.size())
    fail(ErrorCategory::input, "need one demodulation frequency per tone");
  if (!(duration > 0.0)) fail(ErrorCategory::input, "integration time must be positive");
  for (const Tone& t : tones)
    if (!std::isfinite(t.f_d) || !std::isfinite(t.amplitude) || !std::isfinite(t.phase))
      fail(ErrorCategory::input, "tone parameters must be finite");
}

cplx state_pulled_frequency(const ResonatorModel& res, const DispersiveReport& chi, int j) {
  if (j < 0 || j >= static_cast<int>(chi.chi.size())) fail(ErrorCategory::input, "state outside the chi table");
  return {res.f_r + chi.chi[j], -res.kappa / 2.0};
}

std::vector<cplx> trajectory(cplx pulled, const ToneSet& tones, int m, const std::vector<double>& t_grid, cplx a0,
                             double t0) {
  tones.validate();
  const Frame f = frame(pulled, tones, m);
  cplx start = a0;
  for (std::size_t d = 0; d < f.c.size(); ++d) start -= f.c[d] * std::exp(-I * f.dd[d] * t0);
  std::vector<cplx> out;
  out.reserve(t_grid.size());
  double prev = t0;
  for (double t : t_grid) {
    if (t < prev) fail(ErrorCategory::input, "time grid must be ascending and start at or after t0");
    prev = t;
    cplx a = start * std::exp(-I * f.delta * (t - t0));
    for (std::size_t d = 0; d < f.c.size(); ++d) a += f.c[d] * std::exp(-I * f.dd[d] * t);
    out.push_back(a);
  }
  return out;
}

cplx integrate_segment(cplx pulled, const ToneSet& tones, int m, cplx a0, double t0, double t1) {
  const Frame f = frame(pulled, tones, m);
  const double s = t1 - t0;
  cplx start = a0;
  cplx sum = 0.0;
  for (std::size_t d = 0; d < f.c.size(); ++d) {
    const cplx at_t0 = f.c[d] * std::exp(-I * f.dd[d] * t0);
    start -= at_t0;
    sum += at_t0 * exp_integral(f.dd[d], s);
  }
  return sum + start * exp_integral(f.delta, s);
}

std::vector<cplx> integrated_iq(cplx pulled, const ToneSet& tones) {
  tones.validate();
  std::vector<cplx> out;
  for (int m = 0; m < tones.size(); ++m) out.push_back(integrate_segment(pulled, tones, m, 0.0, 0.0, tones.duration));
  return out;
}

IQRecord ideal_record(cplx pulled, const ToneSet& tones, std::optional<int> label) {
  IQRecord r;
  r.true_label = label;
  for (cplx v : integrated_iq(pulled, tones)) {
    r.values.push_back(v.real() / tones.duration);
    r.values.push_back(v.imag() / tones.duration);
  }
  return r;
}

ShotSet synthesize_shots(const std::vector<cplx>& pulled, const std::vector<int>& states, const ToneSet& tones,
                         double noise_sigma, const std::vector<double>& gamma1, int shots_per_state,
                         std::uint64_t seed) {
  tones.validate();
  if (!(noise_sigma >= 0.0)) fail(ErrorCategory::input, "noise sigma must be nonnegative");
  if (shots_per_state < 0) fail(ErrorCategory::input, "shot count must be nonnegative");
  if (!gamma1.empty() && gamma1[0] != 0.0) fail(ErrorCategory::input, "the ground state cannot decay (gamma1[0] = 0)");

  ShotSet out;
  out.tones = tones;
  out.noise_sigma = noise_sigma;
  out.seed = seed;
  const double T = tones.duration;
  const int dim = tones.size();

  for (int j : states) {
    if (j < 0 || j >= static_cast<int>(pulled.size()))
      fail(ErrorCategory::input, "no pulled frequency for state " + std::to_string(j));
    if (j >= static_cast<int>(gamma1.size()))
      fail(ErrorCategory::input, "no decay rate for state " + std::to_string(j));
    if (!(gamma1[j] >= 0.0)) fail(ErrorCategory::input, "decay rates must be nonnegative");
    if (gamma1[j] * T > 0.3) {
      std::ostringstream os;
      os << "state " << j << ": gamma1*T = " << gamma1[j] * T << " exceeds 0.3, single-decay approximation is coarse";
      out.warnings.push_back(os.str());
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int j : states) {
    const std::vector<cplx> clean = integrated_iq(pulled[j], tones);
    std::exponential_distribution<double> decay(gamma1[j] > 0.0 ? gamma1[j] : 1.0);
    for (int s = 0; s < shots_per_state; ++s) {
      IQRecord rec;
      rec.true_label = j;
      bool decayed = false;
      double tau = T;
      if (gamma1[j] > 0.0) {
        tau = decay(rng);
        decayed = tau < T;
      }
      for (int m = 0; m < dim; ++m) {
        cplx v = clean[m];
        if (decayed) {
          const cplx before = integrate_segment(pulled[j], tones, m, 0.0, 0.0, tau);
          const cplx a_tau = trajectory(pulled[j], tones, m, {tau})[0];
          v = before + integrate_segment(pulled[j - 1], tones, m, a_tau, tau, T);
        }
        v /= T;
        rec.values.push_back(v.real() + noise_sigma * noise(rng));
        rec.values.push_back(v.imag() + noise_sigma * noise(rng));
      }
      out.records.push_back(std::move(rec));
      out.decayed.push_back(decayed);
    }
  }
  return out;
}

double cluster_separation(const std::vector<IQRecord>& centres) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < centres.size(); ++a)
    for (std::size_t b = a + 1; b < centres.size(); ++b) {
      if (centres[a].values.size() != centres[b].values.size())
        fail(ErrorCategory::input, "records have different lengths");
      double d2 = 0.0;
      for (std::size_t k = 0; k < centres[a].values.size(); ++k) {
        const double d = centres[a].values[k] - centres[b].values[k];
        d2 += d * d;
      }
      best = std::min(best, std::sqrt(d2));
    }
  return best;
}

ToneSet midpoint_tones(const ResonatorModel& res, const DispersiveReport& chi,
                       const std::vector<std::pair<int, int>>& pairs, const std::vector<double>& amplitudes,
                       double duration) {
  if (pairs.size() != amplitudes.size()) fail(ErrorCategory::input, "need one amplitude per tone");
  ToneSet out;
  out.duration = duration;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double f = 0.5 * (res.f_r + chi.chi.at(pairs[k].first) + res.f_r + chi.chi.at(pairs[k].second));
    out.tones.push_back({f, amplitudes[k], 0.0});
    out.demod_freqs.push_back(f);
  }
  out.validate();
  return out;
}

}  // namespace tqd
