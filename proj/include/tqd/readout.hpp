#pragma once

#include "tqd/dispersive.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tqd {

using cplx = std::complex<double>;

struct Tone {
  double f_d = 0.0;        // drive frequency, GHz
  double amplitude = 0.0;  // Omega_d / 2pi, GHz
  double phase = 0.0;      // rad

  friend bool operator==(const Tone&, const Tone&) = default;
};

struct ToneSet {
  std::vector<Tone> tones;
  std::vector<double> demod_freqs;  // omega_m / 2pi, GHz, one per tone
  double duration = 0.0;            // integration window T, us

  void validate() const;
  int size() const { return static_cast<int>(tones.size()); }

  friend bool operator==(const ToneSet&, const ToneSet&) = default;
};

/// One readout shot: (I_1, Q_1, ..., I_D, Q_D).
struct IQRecord {
  std::vector<double> values;
  std::optional<int> true_label;
};

// f_r + chi_j - i kappa/2, all ordinary frequency in GHz. Multiplying by
// 2pi * 1e3 gives omega - i kappa_angular / 2 in rad/us.
cplx state_pulled_frequency(const ResonatorModel& res, const DispersiveReport& chi, int j);

// Mean-field resonator amplitude in the frame of demodulation tone m,
// starting from A(t0) = a0. Samples must be ascending and not before t0.
std::vector<cplx> trajectory(cplx pulled, const ToneSet& tones, int m, const std::vector<double>& t_grid,
                             cplx a0 = 0.0, double t0 = 0.0);

// Closed-form integral of A(t) over [t0, t1] in the frame of tone m.
cplx integrate_segment(cplx pulled, const ToneSet& tones, int m, cplx a0, double t0, double t1);

// Integral of A over [0, T] for every demodulation frequency (us * amplitude).
std::vector<cplx> integrated_iq(cplx pulled, const ToneSet& tones);

struct ShotSet {
  std::vector<IQRecord> records;
  std::vector<bool> decayed;  // decay happened inside the window
  ToneSet tones;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

/// Labelled synthetic shots. Each shot of state j decays at most once, to
/// j-1, at an exponential time with rate gamma1[j] (1/us). Records hold the
/// integral divided by T plus i.i.d. Gaussian noise of width `noise_sigma`.
/// `pulled[j]` is the complex frequency for state j.
ShotSet synthesize_shots(const std::vector<cplx>& pulled, const std::vector<int>& states, const ToneSet& tones,
                         double noise_sigma, const std::vector<double>& gamma1, int shots_per_state,
                         std::uint64_t seed);

// Noiseless record of state j (integral divided by T).
IQRecord ideal_record(cplx pulled, const ToneSet& tones, std::optional<int> label = std::nullopt);

// Smallest Euclidean distance between any two records.
double cluster_separation(const std::vector<IQRecord>& centres);

// Tones midway between pulled resonator frequencies of the given state pairs,
// each demodulated at its own drive frequency.
ToneSet midpoint_tones(const ResonatorModel& res, const DispersiveReport& chi,
                       const std::vector<std::pair<int, int>>& pairs, const std::vector<double>& amplitudes,
                       double duration);

}  // namespace tqd
