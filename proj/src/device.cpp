#include "tqd/device.hpp"

#include "tqd/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace tqd {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

template <class T>
std::optional<T> opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

std::optional<std::pair<double, double>> opt_pair(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != 2) fail(ErrorCategory::input, std::string(key) + " must hold two values");
  return std::make_pair(v[0], v[1]);
}

std::optional<std::pair<int, int>> opt_int_pair(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const auto v = j.at(key).get<std::vector<int>>();
  if (v.size() != 2) fail(ErrorCategory::input, std::string(key) + " must hold two states");
  return std::make_pair(v[0], v[1]);
}

TransmonEntry transmon_from(const json& j) {
  TransmonEntry t;
  t.model.e_c = j.at("e_c_GHz").get<double>();
  t.model.e_j = j.at("e_j_GHz").get<std::vector<double>>();
  t.model.n_g = j.value("n_g", 0.0);
  t.model.cutoff = j.value("cutoff", kDefaultCutoff);
  t.model.alternating = j.value("alternating_signs", false);
  t.measured_transitions = j.value("measured_transitions_GHz", std::vector<double>{});
  t.t1_us = j.value("t1_us", std::vector<double>{});
  t.resonator = opt<std::string>(j, "resonator");
  t.noise = opt<std::string>(j, "noise");
  t.tone_set = opt<std::string>(j, "tone_set");
  return t;
}

ordered_json transmon_to(const TransmonEntry& t) {
  ordered_json j;
  j["e_c_GHz"] = t.model.e_c;
  j["e_j_GHz"] = t.model.e_j;
  j["n_g"] = t.model.n_g;
  j["cutoff"] = t.model.cutoff;
  j["alternating_signs"] = t.model.alternating;
  if (!t.measured_transitions.empty()) j["measured_transitions_GHz"] = t.measured_transitions;
  if (!t.t1_us.empty()) j["t1_us"] = t.t1_us;
  if (t.resonator) j["resonator"] = *t.resonator;
  if (t.noise) j["noise"] = *t.noise;
  if (t.tone_set) j["tone_set"] = *t.tone_set;
  return j;
}

ResonatorEntry resonator_from(const json& j) {
  ResonatorEntry r;
  r.model.f_r = j.at("f_r_GHz").get<double>();
  r.model.g = j.at("g_GHz").get<double>();
  r.model.kappa = j.at("kappa_GHz").get<double>();
  if (j.contains("kappa_internal_GHz") || j.contains("kappa_coupling_GHz"))
    r.model.kappa_split = std::make_pair(j.at("kappa_internal_GHz").get<double>(), j.at("kappa_coupling_GHz").get<double>());
  r.measured = opt_pair(j, "measured_GHz");
  return r;
}

ordered_json resonator_to(const ResonatorEntry& r) {
  ordered_json j;
  j["f_r_GHz"] = r.model.f_r;
  j["g_GHz"] = r.model.g;
  j["kappa_GHz"] = r.model.kappa;
  if (r.model.kappa_split) {
    j["kappa_internal_GHz"] = r.model.kappa_split->first;
    j["kappa_coupling_GHz"] = r.model.kappa_split->second;
  }
  if (r.measured) j["measured_GHz"] = {r.measured->first, r.measured->second};
  return j;
}

NoiseParams noise_from(const json& j) {
  NoiseParams n;
  n.x_qp = j.value("x_qp", n.x_qp);
  n.gap = j.value("gap_ueV", n.gap);
  n.q_diel0 = j.value("q_diel0", n.q_diel0);
  n.epsilon = j.value("epsilon", n.epsilon);
  n.temperature = j.value("temperature_K", n.temperature);
  return n;
}

ordered_json noise_to(const NoiseParams& n) {
  ordered_json j;
  j["x_qp"] = n.x_qp;
  j["gap_ueV"] = n.gap;
  j["q_diel0"] = n.q_diel0;
  j["epsilon"] = n.epsilon;
  j["temperature_K"] = n.temperature;
  return j;
}

ToneSetEntry tones_from(const json& j) {
  ToneSetEntry t;
  t.duration = j.at("duration_us").get<double>();
  for (const auto& e : j.at("tones")) {
    ToneSpec s;
    s.f_d = opt<double>(e, "f_d_GHz");
    s.between = opt_int_pair(e, "between_states");
    s.amplitude = e.at("amplitude_GHz").get<double>();
    s.phase = e.value("phase_rad", 0.0);
    s.demod = opt<double>(e, "demod_GHz");
    if (s.f_d.has_value() == s.between.has_value())
      fail(ErrorCategory::input, "each tone needs exactly one of f_d_GHz or between_states");
    t.tones.push_back(s);
  }
  return t;
}

ordered_json tones_to(const ToneSetEntry& t) {
  ordered_json tones = ordered_json::array();
  for (const auto& s : t.tones) {
    ordered_json e;
    if (s.f_d) e["f_d_GHz"] = *s.f_d;
    if (s.between) e["between_states"] = {s.between->first, s.between->second};
    e["amplitude_GHz"] = s.amplitude;
    e["phase_rad"] = s.phase;
    if (s.demod) e["demod_GHz"] = *s.demod;
    tones.push_back(e);
  }
  ordered_json j;
  j["duration_us"] = t.duration;
  j["tones"] = tones;
  return j;
}

}  // namespace

void DeviceFile::validate() const {
  for (const auto& [id, t] : transmons) {
    try {
      t.model.validate();
    } catch (const Error& e) {
      fail(e.category(), "transmon " + id + ": " + e.what());
    }
    if (t.resonator && !resonators.count(*t.resonator))
      fail(ErrorCategory::input, "transmon " + id + " references unknown resonator " + *t.resonator);
    if (t.noise && !noise.count(*t.noise))
      fail(ErrorCategory::input, "transmon " + id + " references unknown noise set " + *t.noise);
    if (t.tone_set && !tone_sets.count(*t.tone_set))
      fail(ErrorCategory::input, "transmon " + id + " references unknown tone set " + *t.tone_set);
  }
  for (const auto& [id, r] : resonators) {
    try {
      r.model.validate();
    } catch (const Error& e) {
      fail(e.category(), "resonator " + id + ": " + e.what());
    }
  }
  for (const auto& c : couplings)
    if (!transmons.count(c.a) || !transmons.count(c.b))
      fail(ErrorCategory::input, "coupling " + c.a + "-" + c.b + " references an unknown transmon");
  for (const auto& [id, n] : noise) {
    try {
      n.validate();
    } catch (const Error& e) {
      fail(e.category(), "noise set " + id + ": " + e.what());
    }
  }
  for (const auto& [id, t] : tone_sets)
    if (t.tones.empty() || !(t.duration > 0.0)) fail(ErrorCategory::input, "tone set " + id + " is incomplete");
}

const TransmonEntry& DeviceFile::transmon(const std::string& id) const {
  const auto it = transmons.find(id);
  if (it == transmons.end()) fail(ErrorCategory::input, "no transmon named " + id);
  return it->second;
}

const ResonatorEntry& DeviceFile::resonator_for(const std::string& transmon_id) const {
  const TransmonEntry& t = transmon(transmon_id);
  if (!t.resonator) fail(ErrorCategory::input, "transmon " + transmon_id + " has no resonator");
  return resonators.at(*t.resonator);
}

NoiseParams DeviceFile::noise_for(const std::string& transmon_id) const {
  const TransmonEntry& t = transmon(transmon_id);
  if (!t.noise) return NoiseParams{};
  return noise.at(*t.noise);
}

const CouplingEntry* DeviceFile::coupling(const std::string& a, const std::string& b) const {
  for (const auto& c : couplings)
    if ((c.a == a && c.b == b) || (c.a == b && c.b == a)) return &c;
  return nullptr;
}

DeviceFile parse_device(const std::string& text) {
  DeviceFile d;
  try {
    const json j = json::parse(text);
    if (j.value("schema", std::string{}) != "tqd-device") fail(ErrorCategory::input, "not a device file (schema)");
    if (!j.contains("version")) fail(ErrorCategory::input, "device file has no schema version");
    const int version = j.at("version").get<int>();
    if (version != kDeviceSchemaVersion)
      fail(ErrorCategory::input, "unsupported device schema version " + std::to_string(version));
    d.name = j.value("name", std::string{});
    const json transmons = j.value("transmons", json::object());
    const json resonators = j.value("resonators", json::object());
    const json couplings = j.value("couplings", json::array());
    const json noise = j.value("noise", json::object());
    const json tone_sets = j.value("tone_sets", json::object());
    for (const auto& [id, e] : transmons.items()) d.transmons[id] = transmon_from(e);
    for (const auto& [id, e] : resonators.items()) d.resonators[id] = resonator_from(e);
    for (const auto& e : couplings)
      d.couplings.push_back({e.at("a").get<std::string>(), e.at("b").get<std::string>(), e.at("j_GHz").get<double>(),
                             opt<double>(e, "measured_shift_GHz")});
    for (const auto& [id, e] : noise.items()) d.noise[id] = noise_from(e);
    for (const auto& [id, e] : tone_sets.items()) d.tone_sets[id] = tones_from(e);
  } catch (const json::exception& e) {
    fail(ErrorCategory::input, std::string("malformed device file: ") + e.what());
  }
  d.validate();
  return d;
}

std::string emit_device(const DeviceFile& d) {
  ordered_json j;
  j["schema"] = "tqd-device";
  j["version"] = kDeviceSchemaVersion;
  j["name"] = d.name;
  ordered_json transmons = ordered_json::object(), resonators = ordered_json::object();
  ordered_json noise = ordered_json::object(), tones = ordered_json::object();
  for (const auto& [id, t] : d.transmons) transmons[id] = transmon_to(t);
  for (const auto& [id, r] : d.resonators) resonators[id] = resonator_to(r);
  for (const auto& [id, n] : d.noise) noise[id] = noise_to(n);
  for (const auto& [id, t] : d.tone_sets) tones[id] = tones_to(t);
  ordered_json couplings = ordered_json::array();
  for (const auto& c : d.couplings) {
    ordered_json e;
    e["a"] = c.a;
    e["b"] = c.b;
    e["j_GHz"] = c.j;
    if (c.measured_shift) e["measured_shift_GHz"] = *c.measured_shift;
    couplings.push_back(e);
  }
  j["transmons"] = transmons;
  j["resonators"] = resonators;
  j["couplings"] = couplings;
  j["noise"] = noise;
  j["tone_sets"] = tones;
  return j.dump(2) + "\n";
}

DeviceFile load_device(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCategory::input, "cannot read device file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_device(ss.str());
}

void save_device(const std::string& path, const DeviceFile& device) {
  std::ofstream os(path);
  if (!os) fail(ErrorCategory::input, "cannot write " + path);
  os << emit_device(device);
}

ToneSet resolve_tones(const ToneSetEntry& entry, const ResonatorModel& res, const DispersiveReport& chi) {
  ToneSet out;
  out.duration = entry.duration;
  for (const auto& s : entry.tones) {
    double f = 0.0;
    if (s.f_d) {
      f = *s.f_d;
    } else {
      const auto [a, b] = *s.between;
      if (a < 0 || b < 0 || a >= static_cast<int>(chi.chi.size()) || b >= static_cast<int>(chi.chi.size()))
        fail(ErrorCategory::input, "tone references a state outside the dispersive table");
      f = res.f_r + 0.5 * (chi.chi[a] + chi.chi[b]);
    }
    out.tones.push_back({f, s.amplitude, s.phase});
    out.demod_freqs.push_back(s.demod.value_or(f));
  }
  out.validate();
  return out;
}

}  // namespace tqd
