#pragma once

#include "tqd/dispersive.hpp"
#include "tqd/hamiltonian.hpp"
#include "tqd/noise_budget.hpp"
#include "tqd/readout.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tqd {

inline constexpr int kDeviceSchemaVersion = 1;

struct TransmonEntry {
  TransmonModel model;
  std::vector<double> measured_transitions;  // f_{i,i+1}, GHz
  std::vector<double> t1_us;                 // T1 of levels 1, 2, ...
  std::optional<std::string> resonator;
  std::optional<std::string> noise;
  std::optional<std::string> tone_set;

  friend bool operator==(const TransmonEntry&, const TransmonEntry&) = default;
};

struct ResonatorEntry {
  ResonatorModel model;
  std::optional<std::pair<double, double>> measured;  // (f_r|0>, f_r|1>), GHz

  friend bool operator==(const ResonatorEntry&, const ResonatorEntry&) = default;
};

struct CouplingEntry {
  std::string a;
  std::string b;
  double j = 0.0;                         // GHz
  std::optional<double> measured_shift;   // Delta f^{|1>}_{01}, GHz

  friend bool operator==(const CouplingEntry&, const CouplingEntry&) = default;
};

// A tone either at an explicit frequency or midway between the pulled
// resonator frequencies of two transmon states.
struct ToneSpec {
  std::optional<double> f_d;
  std::optional<std::pair<int, int>> between;
  double amplitude = 0.0;  // Omega / 2pi, GHz
  double phase = 0.0;
  std::optional<double> demod;  // defaults to the drive frequency

  friend bool operator==(const ToneSpec&, const ToneSpec&) = default;
};

struct ToneSetEntry {
  std::vector<ToneSpec> tones;
  double duration = 0.0;  // us

  friend bool operator==(const ToneSetEntry&, const ToneSetEntry&) = default;
};

struct DeviceFile {
  std::string name;
  std::map<std::string, TransmonEntry> transmons;
  std::map<std::string, ResonatorEntry> resonators;
  std::vector<CouplingEntry> couplings;
  std::map<std::string, NoiseParams> noise;
  std::map<std::string, ToneSetEntry> tone_sets;

  // All references resolve and every model satisfies its invariants.
  void validate() const;

  const TransmonEntry& transmon(const std::string& id) const;
  const ResonatorEntry& resonator_for(const std::string& transmon_id) const;
  NoiseParams noise_for(const std::string& transmon_id) const;
  const CouplingEntry* coupling(const std::string& a, const std::string& b) const;

  friend bool operator==(const DeviceFile&, const DeviceFile&) = default;
};

DeviceFile parse_device(const std::string& text);
std::string emit_device(const DeviceFile& device);
DeviceFile load_device(const std::string& path);
void save_device(const std::string& path, const DeviceFile& device);

ToneSet resolve_tones(const ToneSetEntry& entry, const ResonatorModel& res, const DispersiveReport& chi);

}  // namespace tqd
