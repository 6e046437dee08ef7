// tqd-cli: command-line front end over the tqd library.
#include "tqd/analysis.hpp"
#include "tqd/coupling.hpp"
#include "tqd/device.hpp"
#include "tqd/discriminate.hpp"
#include "tqd/dispersive.hpp"
#include "tqd/error.hpp"
#include "tqd/noise_budget.hpp"
#include "tqd/paramfit.hpp"
#include "tqd/readout.hpp"
#include "tqd/shot_io.hpp"
#include "tqd/spectrum.hpp"
#include "tqd/tomography.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace tqd;

namespace {

struct Globals {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool plot_data = false;
};

Globals g_opts;

// Shortest round-trippable text for a double, so CSVs are byte-stable.
std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class Csv {
public:
  Csv(const std::string& name, const std::vector<std::string>& header) : path_(fs::path(g_opts.out_dir) / name) {
    os_.open(path_);
    if (!os_) fail(ErrorCategory::input, "cannot write " + path_.string());
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) os_ << (k ? "," : "") << cells[k];
    os_ << "\n";
  }
  std::string path() const { return path_.string(); }

private:
  fs::path path_;
  std::ofstream os_;
};

void emit_report(const std::string& name, ordered_json report, const std::vector<std::string>& files) {
  report["files"] = files;
  const std::string text = report.dump(2) + "\n";
  std::ofstream os(fs::path(g_opts.out_dir) / (name + "_report.json"));
  if (!os) fail(ErrorCategory::input, "cannot write report for " + name);
  os << text;
  std::cout << text;
}

ordered_json model_json(const TransmonModel& m) {
  return {{"e_c_GHz", m.e_c}, {"e_j_GHz", m.e_j}, {"n_g", m.n_g}, {"cutoff", m.cutoff}};
}

ordered_json resonator_json(const ResonatorModel& r) {
  return {{"f_r_GHz", r.f_r}, {"g_GHz", r.g}, {"kappa_GHz", r.kappa}};
}

std::string pick_transmon(const DeviceFile& dev, const std::string& requested) {
  if (!requested.empty()) {
    (void)dev.transmon(requested);
    return requested;
  }
  if (dev.transmons.size() != 1)
    fail(ErrorCategory::input, "device holds several transmons; choose one with --transmon");
  return dev.transmons.begin()->first;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = a + (b - a) * k / (n - 1);
  return v;
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
  std::string device, transmon;
  int levels = 0;
};

void run_spectrum(const SpectrumArgs& a) {
  const auto dev = load_device(a.device);
  const auto id = pick_transmon(dev, a.transmon);
  const auto& t = dev.transmon(id);
  const int confined = t.model.e_j[0] > 0.0 ? n_levels(t.model.e_j[0], t.model.e_c) : 0;
  const int levels = a.levels > 0 ? a.levels : std::max(3, confined + 2);
  t.model.require_levels(levels);
  const auto rep = transitions_and_anharmonicities(eigensolve(t.model, levels));

  Csv csv("spectrum.csv", {"i", "f_i_ip1_GHz", "alpha_GHz", "measured_GHz", "residual_kHz"});
  for (std::size_t i = 0; i < rep.transitions.size(); ++i) {
    const double alpha = i > 0 ? rep.anharmonicities[i - 1] : NAN;
    const bool have = i < t.measured_transitions.size();
    csv.row({std::to_string(i), num(rep.transitions[i]), num(alpha), have ? num(t.measured_transitions[i]) : "",
             have ? num((rep.transitions[i] - t.measured_transitions[i]) * 1e6) : ""});
  }
  std::vector<std::string> files{csv.path()};
  if (g_opts.plot_data) {
    std::vector<std::string> header{"n_g"};
    for (int k = 0; k < levels; ++k) header.push_back("E" + std::to_string(k) + "_GHz");
    Csv plot("spectrum_vs_ng.csv", header);
    for (double ng : linspace(-1.0, 1.0, 201)) {
      const auto s = eigensolve(t.model.with_offset(ng), levels);
      std::vector<std::string> row{num(ng)};
      for (int k = 0; k < levels; ++k) row.push_back(num(s.energy(k) - s.energy(0)));
      plot.row(row);
    }
    files.push_back(plot.path());
  }
  emit_report("spectrum", {{"command", "spectrum"}, {"transmon", id}, {"model", model_json(t.model)},
                           {"n_levels", rep.n_levels}, {"transitions_GHz", rep.transitions},
                           {"anharmonicities_GHz", rep.anharmonicities},
                           {"transitions_decreasing", transitions_decreasing(rep, rep.n_levels)}},
              files);
}

// -------------------------------------------------------------- dispersion

void run_dispersion(const SpectrumArgs& a) {
  const auto dev = load_device(a.device);
  const auto id = pick_transmon(dev, a.transmon);
  const auto& t = dev.transmon(id);
  const int confined = t.model.e_j[0] > 0.0 ? n_levels(t.model.e_j[0], t.model.e_c) : 0;
  const int levels = a.levels > 0 ? a.levels : std::max(3, confined + 1);
  const auto table = charge_dispersion_table(t.model, levels + 1);
  const double ratio = t.model.e_j[0] / t.model.e_c;
  const bool asymptotic = t.model.harmonics() == 1 && ratio >= kAsymptoticMinRatio;

  Csv csv("dispersion.csv", {"m", "epsilon_GHz", "epsilon_asymptotic_GHz", "near_degenerate", "delta_f_m_mp1_kHz"});
  ordered_json df = ordered_json::array();
  for (int m = 0; m < levels; ++m) {
    const double d = std::abs(table.epsilon[m]) + std::abs(table.epsilon[m + 1]);
    df.push_back(d * 1e6);
    csv.row({std::to_string(m), num(table.epsilon[m]),
             asymptotic ? num(charge_dispersion_asymptotic(t.model.e_j[0], t.model.e_c, m)) : "",
             table.near_degenerate[m] ? "1" : "0", num(d * 1e6)});
  }
  std::vector<std::string> files{csv.path()};
  if (g_opts.plot_data) {
    Csv plot("dispersion_plot.csv", {"transition", "delta_f_kHz"});
    for (int m = 0; m < levels; ++m)
      plot.row({std::to_string(m) + "-" + std::to_string(m + 1), num(df[m].get<double>())});
    files.push_back(plot.path());
  }
  emit_report("dispersion", {{"command", "dispersion"}, {"transmon", id}, {"model", model_json(t.model)},
                             {"epsilon_GHz", std::vector<double>(table.epsilon.begin(), table.epsilon.end() - 1)},
                             {"delta_f_kHz", df}},
              files);
}

// -------------------------------------------------------------- dispersive

struct DispersiveArgs {
  std::string device, transmon;
  int levels = 10;
  int photons = 0;
};

void run_dispersive(const DispersiveArgs& a) {
  const auto dev = load_device(a.device);
  const auto id = pick_transmon(dev, a.transmon);
  const auto& t = dev.transmon(id);
  const auto res = dev.resonator_for(id).model;
  const auto rep = stark_and_lamb(eigensolve(t.model, a.levels + 6), res, a.levels);
  std::optional<DressedTable> dressed;
  if (a.photons > 0) dressed = dressed_oracle(t.model, res, 2 * a.levels + 2, a.photons);

  Csv csv("chi.csv", {"i", "chi_kHz", "delta_chi_kHz", "resonator_GHz", "lamb_GHz", "dressed_resonator_GHz"});
  for (int i = 0; i < a.levels; ++i)
    csv.row({std::to_string(i), num(rep.chi[i] * 1e6), num(rep.delta_chi[i] * 1e6),
             num(rep.resonator_frequency(res, i)), num(rep.lamb[i]), dressed ? num(dressed->pull(i)) : ""});
  std::vector<double> chi_khz;
  for (double c : rep.chi) chi_khz.push_back(c * 1e6);
  ordered_json report{{"command", "dispersive"}, {"transmon", id}, {"resonator", resonator_json(res)},
                      {"chi_kHz", chi_khz}, {"window", rep.window}, {"tail_bound_GHz", rep.tail_bound},
                      {"warnings", rep.warnings}};
  if (a.levels > 1) report["delta_chi1_kHz"] = rep.delta_chi[1] * 1e6;
  if (dressed && a.levels > 1) report["dressed_delta_chi1_kHz"] = (dressed->pull(1) - dressed->pull(0)) * 1e6;
  emit_report("dispersive", report, {csv.path()});
}

// --------------------------------------------------------------------- fit

struct FitArgs {
  std::string device, transmon, mode = "joint";
  int harmonics = 0;
  int levels = 0;
};

void run_fit(const FitArgs& a) {
  const auto dev = load_device(a.device);
  const auto id = pick_transmon(dev, a.transmon);
  const auto& t = dev.transmon(id);
  const auto& meas = t.measured_transitions;
  if (meas.size() < 2) fail(ErrorCategory::arity, "fit needs at least f01 and f12 in measured_transitions_GHz");

  FitResult fit;
  if (a.harmonics == 0) {
    fit = fit_standard(meas[0], meas[1]);
  } else {
    ObservationSet obs;
    for (int i = 0; i <= a.harmonics && i < static_cast<int>(meas.size()); ++i) obs.transition_freqs.emplace_back(i, meas[i]);
    if (t.resonator) obs.resonator_freqs = dev.resonator_for(id).measured;
    HarmonicsOptions opt;
    if (a.mode == "fixed_first") opt.mode = ResonatorFitMode::fixed_first;
    else if (a.mode != "joint") fail(ErrorCategory::input, "--mode must be joint or fixed_first");
    if (t.resonator) opt.kappa = dev.resonator_for(id).model.kappa;
    if (g_opts.seed) opt.seed = *g_opts.seed;
    fit = fit_harmonics(obs, a.harmonics, opt);
  }
  const int levels = a.levels > 0 ? a.levels : std::max<int>(static_cast<int>(meas.size()) + 1, 3);
  const auto pred = predict_observables(fit, levels);

  Csv csv("fit.csv", {"i", "measured_GHz", "predicted_GHz", "residual_kHz", "delta_f_kHz"});
  ordered_json residuals = ordered_json::array();
  for (std::size_t i = 0; i < pred.transitions.size(); ++i) {
    const bool have = i < meas.size();
    const double r = have ? (pred.transitions[i] - meas[i]) * 1e6 : NAN;
    if (have) residuals.push_back(r);
    csv.row({std::to_string(i), have ? num(meas[i]) : "", num(pred.transitions[i]), num(r), num(pred.delta_f[i] * 1e6)});
  }
  std::vector<std::string> files{csv.path()};
  if (g_opts.plot_data) {
    Csv plot("fit_residuals_plot.csv", {"transition", "residual_kHz"});
    for (std::size_t i = 0; i < residuals.size(); ++i) plot.row({std::to_string(i), num(residuals[i].get<double>())});
    files.push_back(plot.path());
  }
  ordered_json report{{"command", "fit"},
                      {"transmon", id},
                      {"harmonics", a.harmonics == 0 ? 1 : a.harmonics},
                      {"mode", mode_name(fit.mode)},
                      {"model", model_json(fit.model)},
                      {"converged", fit.converged},
                      {"max_fit_residual_kHz", fit.max_abs_residual() * 1e6},
                      {"prediction_residuals_kHz", residuals},
                      {"n_levels", n_levels(fit.model.e_j[0], fit.model.e_c)}};
  if (fit.model.harmonics() >= 2) report["e_j2_over_e_j1_percent"] = 100.0 * fit.model.e_j[1] / fit.model.e_j[0];
  if (fit.resonator) report["resonator"] = resonator_json(*fit.resonator);
  emit_report("fit", report, files);
}

// ---------------------------------------------------------------------- zz

struct ZZArgs {
  std::string device, control, target;
  int levels = 6;
  int transitions = 0;
  int trunc = kDefaultJointTruncation;
  double j = 0.0;
};

void run_zz(const ZZArgs& a) {
  const auto dev = load_device(a.device);
  const auto* c = dev.coupling(a.control, a.target);
  double j = a.j;
  if (j == 0.0) {
    if (!c) fail(ErrorCategory::input, "no coupling between " + a.control + " and " + a.target + "; pass --j");
    j = c->j;
  }
  const int transitions = a.transitions > 0 ? a.transitions : a.levels;
  const auto target = eigensolve(dev.transmon(a.target).model, a.trunc);
  const auto control = eigensolve(dev.transmon(a.control).model, a.trunc);
  const auto joint = build_joint(target, control, j, a.trunc);
  auto zz = zz_shift_matrix(joint, a.levels, transitions);
  zz.control_id = a.control;
  zz.target_id = a.target;

  std::vector<std::string> header{"target_transition"};
  for (int k = 0; k < a.levels; ++k) header.push_back("control_" + std::to_string(k) + "_MHz");
  Csv csv("zz.csv", header);
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < transitions; ++i) {
    std::vector<std::string> row{std::to_string(i) + "-" + std::to_string(i + 1)};
    std::vector<double> r;
    for (int k = 0; k < a.levels; ++k) {
      row.push_back(num(zz.shifts(i, k) * 1e3));
      r.push_back(zz.shifts(i, k) * 1e3);
    }
    csv.row(row);
    rows.push_back(r);
  }
  ordered_json report{{"command", "zz"},     {"control", a.control},      {"target", a.target},
                      {"j_GHz", j},          {"shifts_MHz", rows},        {"warnings", joint.warnings()}};
  if (c && c->measured_shift) {
    report["measured_shift_GHz"] = *c->measured_shift;
    report["fitted_j_GHz"] = fit_j_from_shift(target, control, *c->measured_shift, a.trunc);
  }
  emit_report("zz", report, {csv.path()});
}

// ----------------------------------------------------------------- readout

struct SimArgs {
  std::string device, transmon, tone_set, output = "shots.csv";
  int states = 10;
  int shots = 1000;
  double sigma = 0.0;
  double sigma_fraction = 0.05;
  bool decay = false;
};

void run_readout_sim(const SimArgs& a) {
  const auto dev = load_device(a.device);
  const auto id = pick_transmon(dev, a.transmon);
  const auto& t = dev.transmon(id);
  const auto res = dev.resonator_for(id).model;
  const std::string ts = !a.tone_set.empty() ? a.tone_set : t.tone_set.value_or("");
  if (ts.empty() || !dev.tone_sets.count(ts)) fail(ErrorCategory::input, "no tone set for " + id + "; pass --tone-set");
  const auto rep = stark_and_lamb(eigensolve(t.model, a.states + 6), res, a.states);
  const auto tones = resolve_tones(dev.tone_sets.at(ts), res, rep);

  std::vector<cplx> pulled;
  std::vector<int> states;
  std::vector<IQRecord> centres;
  for (int j = 0; j < a.states; ++j) {
    pulled.push_back(state_pulled_frequency(res, rep, j));
    states.push_back(j);
    centres.push_back(ideal_record(pulled.back(), tones, j));
  }
  const double separation = cluster_separation(centres);
  const double sigma = a.sigma > 0.0 ? a.sigma : a.sigma_fraction * separation;
  std::vector<double> gamma(a.states, 0.0);
  if (a.decay) {
    if (static_cast<int>(t.t1_us.size()) < a.states - 1) fail(ErrorCategory::input, "device lacks t1_us for every state");
    for (int j = 1; j < a.states; ++j) gamma[j] = 1.0 / t.t1_us[j - 1];
  }
  const auto shots = synthesize_shots(pulled, states, tones, sigma, gamma, a.shots, g_opts.seed.value_or(1));
  const std::string path = (fs::path(g_opts.out_dir) / a.output).string();
  save_shots(path, shots);
  std::vector<std::string> files{path};
  if (g_opts.plot_data) {
    std::vector<std::string> header{"state"};
    for (int m = 0; m < tones.size(); ++m) {
      header.push_back("I" + std::to_string(m + 1));
      header.push_back("Q" + std::to_string(m + 1));
    }
    Csv plot("readout_centres.csv", header);
    for (const auto& c : centres) {
      std::vector<std::string> row{std::to_string(*c.true_label)};
      for (double v : c.values) row.push_back(num(v));
      plot.row(row);
    }
    files.push_back(plot.path());
  }
  ordered_json tone_list = ordered_json::array();
  for (int m = 0; m < tones.size(); ++m)
    tone_list.push_back({{"f_d_GHz", tones.tones[m].f_d}, {"amplitude_GHz", tones.tones[m].amplitude}});
  std::size_t decayed = 0;
  for (bool d : shots.decayed) decayed += d ? 1 : 0;
  emit_report("readout_sim", {{"command", "readout sim"}, {"transmon", id}, {"tones", tone_list},
                              {"duration_us", tones.duration}, {"cluster_separation", separation},
                              {"noise_sigma", sigma}, {"records", shots.records.size()}, {"decayed", decayed},
                              {"seed", shots.seed}, {"warnings", shots.warnings}},
              files);
}

struct TrainArgs {
  std::string shots, output = "classifier.json";
  bool shared = false, weights = false, em = false;
  int folds = 0;
};

void run_readout_train(const TrainArgs& a) {
  const auto shots = load_shots(a.shots);
  TrainOptions opt;
  opt.shared_covariance = a.shared;
  opt.mixture_weights = a.weights;
  opt.em_refine = a.em;
  const auto clf = train(shots.records, opt);
  const std::string path = (fs::path(g_opts.out_dir) / a.output).string();
  save_classifier(path, clf);
  const auto am = assignment_matrix(clf, shots.records);
  ordered_json report{{"command", "readout train"}, {"states", clf.states()}, {"dim", clf.dim()},
                      {"training_fidelity", am.fidelity}, {"em_iterations", clf.em_history.size()}};
  if (a.folds >= 2) report["cross_validated_fidelity"] = kfold_fidelity(shots.records, a.folds, opt, g_opts.seed.value_or(1)).mean_fidelity;
  emit_report("readout_train", report, {path});
}

struct ClassifyArgs {
  std::string classifier, shots;
};

void run_readout_classify(const ClassifyArgs& a) {
  const auto clf = load_classifier(a.classifier);
  const auto shots = load_shots(a.shots);
  const auto labels = classify_batch(clf, shots.records);
  Csv csv("labels.csv", {"index", "true_label", "assigned"});
  std::vector<int> counts(clf.states(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& t = shots.records[i].true_label;
    csv.row({std::to_string(i), t ? std::to_string(*t) : "", std::to_string(labels[i])});
    ++counts[labels[i]];
  }
  emit_report("readout_classify", {{"command", "readout classify"}, {"records", labels.size()}, {"assigned_counts", counts}},
              {csv.path()});
}

void run_readout_confusion(const ClassifyArgs& a) {
  const auto clf = load_classifier(a.classifier);
  const auto shots = load_shots(a.shots);
  const auto am = assignment_matrix(clf, shots.records);
  std::vector<std::string> header{"assigned"};
  for (int j = 0; j < clf.states(); ++j) header.push_back("prepared_" + std::to_string(j));
  Csv csv("confusion.csv", header);
  ordered_json diag = ordered_json::array();
  for (int i = 0; i < clf.states(); ++i) {
    std::vector<std::string> row{std::to_string(i)};
    for (int j = 0; j < clf.states(); ++j) row.push_back(num(am.p(i, j)));
    csv.row(row);
    diag.push_back(am.p(i, i));
  }
  emit_report("readout_confusion", {{"command", "readout confusion"}, {"fidelity", am.fidelity}, {"diagonal", diag}},
              {csv.path()});
}

// --------------------------------------------------------------- t1-budget

struct BudgetArgs {
  std::string device, transmon, t1_csv;
  int levels = 0;
  bool fit_dielectric = false;
  bool weighted = false;
};

// Rows of (level, T1 us, uncertainty us); a non-numeric first row is a header.
struct MeasuredT1 {
  std::vector<int> level;
  std::vector<double> t1, sigma;
};

MeasuredT1 read_t1_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCategory::input, "cannot read " + path);
  MeasuredT1 out;
  std::string line;
  int row = 0;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    std::getline(ss, c, ',');
    try {
      out.level.push_back(std::stoi(a));
      out.t1.push_back(std::stod(b));
      out.sigma.push_back(c.empty() ? 0.0 : std::stod(c));
    } catch (const std::exception&) {
      if (row == 1) continue;
      fail(ErrorCategory::input, path + ": row " + std::to_string(row) + " is not level,T1_us,uncertainty_us");
    }
  }
  for (std::size_t k = 0; k < out.level.size(); ++k)
    if (out.level[k] != static_cast<int>(k) + 1) fail(ErrorCategory::input, path + ": levels must run 1, 2, 3, ...");
  return out;
}

void run_t1_budget(const BudgetArgs& a) {
  const auto dev = load_device(a.device);
  const auto id = pick_transmon(dev, a.transmon);
  const auto& t = dev.transmon(id);
  const auto res = dev.resonator_for(id).model;
  NoiseParams np = dev.noise_for(id);

  MeasuredT1 measured;
  if (!a.t1_csv.empty()) {
    measured = read_t1_csv(a.t1_csv);
  } else {
    for (std::size_t k = 0; k < t.t1_us.size(); ++k) {
      measured.level.push_back(static_cast<int>(k) + 1);
      measured.t1.push_back(t.t1_us[k]);
      measured.sigma.push_back(0.0);
    }
  }
  const int levels = a.levels > 0 ? a.levels : std::max<int>(static_cast<int>(measured.t1.size()), 9);
  const auto sol = eigensolve(t.model, levels + 2);

  ordered_json report{{"command", "t1-budget"}, {"transmon", id}};
  if (a.fit_dielectric) {
    if (measured.t1.size() < 3) fail(ErrorCategory::arity, "dielectric fit needs measured T1 for at least three levels");
    std::vector<double> gamma;
    for (double v : measured.t1) gamma.push_back(1.0 / v);
    std::optional<std::vector<double>> weights;
    if (a.weighted) {
      weights.emplace();
      for (std::size_t k = 0; k < measured.t1.size(); ++k) {
        if (!(measured.sigma[k] > 0.0)) fail(ErrorCategory::input, "--weighted needs a positive uncertainty on every row");
        // Log-space weight is T1 / sigma(T1).
        weights->push_back(std::pow(measured.t1[k] / measured.sigma[k], 2));
      }
    }
    const auto fit = fit_dielectric_params(gamma, sol, res, np.x_qp, np.gap, np.temperature, weights);
    np.q_diel0 = fit.q_diel0;
    np.epsilon = fit.epsilon;
    report["dielectric_fit"] = {{"q_diel0", fit.q_diel0}, {"epsilon", fit.epsilon}, {"converged", fit.converged},
                                {"log_residuals", fit.log_residuals}, {"weighted", a.weighted}};
  }
  report["noise"] = {{"x_qp", np.x_qp}, {"gap_ueV", np.gap}, {"q_diel0", np.q_diel0}, {"epsilon", np.epsilon},
                     {"temperature_K", np.temperature}};

  Csv csv("t1_budget.csv", {"level", "T1_qp_us", "T1_purcell_us", "T1_dielectric_us", "T1_total_us", "T1_measured_us"});
  ordered_json rows = ordered_json::array();
  std::vector<std::string> warnings;
  for (int i = 1; i <= levels; ++i) {
    const auto b = total_gamma(sol, res, np, i);
    warnings.insert(warnings.end(), b.warnings.begin(), b.warnings.end());
    const bool have = i <= static_cast<int>(measured.t1.size());
    csv.row({std::to_string(i), num(1.0 / b.qp), num(1.0 / b.purcell), num(1.0 / b.dielectric), num(1.0 / b.total()),
             have ? num(measured.t1[i - 1]) : ""});
    rows.push_back({{"level", i}, {"qp_us", 1.0 / b.qp}, {"purcell_us", 1.0 / b.purcell},
                    {"dielectric_us", 1.0 / b.dielectric}, {"total_us", 1.0 / b.total()}});
  }
  report["levels"] = rows;
  report["warnings"] = warnings;
  emit_report("t1_budget", report, {csv.path()});
}

// ------------------------------------------------------------ rb / ramsey

struct SeriesArgs {
  std::string data;
  int d = 2;
};

void run_rb_fit(const SeriesArgs& a) {
  const auto [depth, survival] = read_series_csv(a.data);
  const auto rb = fit_rb(depth, survival, a.d);
  Csv csv("rb_fit.csv", {"depth", "survival", "model"});
  const auto& f = rb.decay;
  for (std::size_t k = 0; k < depth.size(); ++k)
    csv.row({num(depth[k]), num(survival[k]), num(f.amplitude * std::pow(f.constant, depth[k]) + f.offset)});
  std::vector<std::string> files{csv.path()};
  if (g_opts.plot_data) {
    Csv plot("rb_fit_curve.csv", {"depth", "model"});
    for (double m : linspace(0.0, depth.back(), 200)) plot.row({num(m), num(f.amplitude * std::pow(f.constant, m) + f.offset)});
    files.push_back(plot.path());
  }
  emit_report("rb_fit", {{"command", "rb-fit"}, {"r", f.constant}, {"r_stderr", f.stderr_of(1)}, {"amplitude", f.amplitude},
                         {"offset", f.offset}, {"e_f", rb.e_f}, {"e_f_stderr", rb.e_f_stderr}, {"d", a.d}},
              files);
}

void run_ramsey_fit(const SeriesArgs& a) {
  const auto [t, p] = read_series_csv(a.data);
  const auto fit = fit_ramsey_beat(t, p);
  Csv csv("ramsey_fit.csv", {"t_us", "population", "model"});
  for (std::size_t k = 0; k < t.size(); ++k) csv.row({num(t[k]), num(p[k]), num(fit.evaluate(t[k]))});
  std::vector<std::string> files{csv.path()};
  if (g_opts.plot_data) {
    Csv plot("ramsey_fit_curve.csv", {"t_us", "model"});
    for (double x : linspace(t.front(), t.back(), 1000)) plot.row({num(x), num(fit.evaluate(x))});
    files.push_back(plot.path());
  }
  emit_report("ramsey_fit", {{"command", "ramsey-fit"}, {"c", fit.c}, {"t2r_us", fit.t2r}, {"a0", fit.a0}, {"a1", fit.a1},
                             {"f_e_GHz", fit.f_e}, {"f_o_GHz", fit.f_o}, {"delta_f_kHz", (fit.f_o - fit.f_e) * 1e6},
                             {"phi0", fit.phi0}, {"phi1", fit.phi1}, {"free_phases", fit.free_phases},
                             {"residual_rms", fit.residual_rms}, {"warnings", fit.warnings}},
              files);
}

// -------------------------------------------------------------------- tomo

struct TomoArgs {
  int d = 3;
  std::string probs;
};

void run_tomo_gates(const TomoArgs& a) {
  const auto gates = tomography_gate_set(a.d);
  Csv csv("tomo_gates.csv", {"index", "mnemonic"});
  for (std::size_t k = 0; k < gates.size(); ++k) csv.row({std::to_string(k), gates[k].mnemonic()});
  emit_report("tomo_gates", {{"command", "tomo gates"}, {"d", a.d}, {"count", gates.size()}}, {csv.path()});
}

// Input rows: gate mnemonic followed by d outcome probabilities; first row is a header.
void run_tomo_reconstruct(const TomoArgs& a) {
  std::ifstream is(a.probs);
  if (!is) fail(ErrorCategory::input, "cannot read " + a.probs);
  std::string line;
  std::getline(is, line);
  std::vector<GateSequence> gates;
  std::vector<std::vector<double>> rows;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    gates.push_back(GateSequence::parse(cell));
    std::vector<double> p;
    while (std::getline(ss, cell, ',')) {
      try {
        p.push_back(std::stod(cell));
      } catch (const std::exception&) {
        fail(ErrorCategory::input, a.probs + ": bad probability on row " + std::to_string(row));
      }
    }
    if (static_cast<int>(p.size()) != a.d)
      fail(ErrorCategory::input, a.probs + ": row " + std::to_string(row) + " needs " + std::to_string(a.d) + " probabilities");
    rows.push_back(std::move(p));
  }
  Eigen::MatrixXd probs(static_cast<Eigen::Index>(rows.size()), a.d);
  for (std::size_t g = 0; g < rows.size(); ++g)
    for (int i = 0; i < a.d; ++i) probs(static_cast<Eigen::Index>(g), i) = rows[g][i];
  const auto rho = reconstruct_state(probs, gates);

  Csv csv("rho.csv", {"row", "col", "re", "im"});
  for (int r = 0; r < a.d; ++r)
    for (int c = 0; c < a.d; ++c) csv.row({std::to_string(r), std::to_string(c), num(rho(r, c).real()), num(rho(r, c).imag())});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  std::vector<double> eig(es.eigenvalues().data(), es.eigenvalues().data() + a.d);
  std::vector<double> populations;
  for (int i = 0; i < a.d; ++i) populations.push_back(rho(i, i).real());
  emit_report("tomo_reconstruct", {{"command", "tomo reconstruct"}, {"d", a.d}, {"eigenvalues", eig},
                                   {"purity", (rho * rho).trace().real()}, {"populations", populations}},
              {csv.path()});
}

void print_error(std::string_view category, const std::string& message) {
  ordered_json j{{"error", {{"category", category}, {"message", message}}}};
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmon qudit device modelling and readout analysis"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_option("--out-dir", g_opts.out_dir, "Directory for CSV, report and model files");
  app.add_option("--seed", g_opts.seed, "Seed for stochastic steps");
  app.add_flag("--plot-data", g_opts.plot_data, "Also write x/y series for plotting");

  std::function<void()> action;

  SpectrumArgs spec_args;
  auto* spectrum = app.add_subcommand("spectrum", "Transitions, anharmonicities and confined levels");
  spectrum->add_option("device", spec_args.device, "Device file")->required();
  spectrum->add_option("--transmon", spec_args.transmon, "Transmon id");
  spectrum->add_option("--levels", spec_args.levels, "Levels to diagonalize (default: confined + 2)");
  spectrum->callback([&] { action = [&] { run_spectrum(spec_args); }; });

  SpectrumArgs disp_args;
  auto* dispersion = app.add_subcommand("dispersion", "Charge dispersion and parity beat per transition");
  dispersion->add_option("device", disp_args.device, "Device file")->required();
  dispersion->add_option("--transmon", disp_args.transmon, "Transmon id");
  dispersion->add_option("--levels", disp_args.levels, "Levels to report (default: confined + 1)");
  dispersion->callback([&] { action = [&] { run_dispersion(disp_args); }; });

  DispersiveArgs chi_args;
  auto* dispersive = app.add_subcommand("dispersive", "State-dependent resonator pulls");
  dispersive->add_option("device", chi_args.device, "Device file")->required();
  dispersive->add_option("--transmon", chi_args.transmon, "Transmon id");
  dispersive->add_option("--levels", chi_args.levels, "Transmon levels")->check(CLI::PositiveNumber);
  dispersive->add_option("--dressed-photons", chi_args.photons, "Also diagonalize the coupled system with this photon cutoff");
  dispersive->callback([&] { action = [&] { run_dispersive(chi_args); }; });

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Fit E_C, E_J (and harmonics) to measured transitions");
  fit->add_option("device", fit_args.device, "Device file")->required();
  fit->add_option("--transmon", fit_args.transmon, "Transmon id");
  fit->add_option("--harmonics", fit_args.harmonics, "Number of Josephson harmonics M (0: standard fit)")
      ->check(CLI::Range(0, kMaxFittedTransition));
  fit->add_option("--mode", fit_args.mode, "joint or fixed_first");
  fit->add_option("--levels", fit_args.levels, "Levels for predictions");
  fit->callback([&] { action = [&] { run_fit(fit_args); }; });

  ZZArgs zz_args;
  auto* zz = app.add_subcommand("zz", "Conditional transition shifts of a coupled pair");
  zz->add_option("device", zz_args.device, "Device file")->required();
  zz->add_option("--control", zz_args.control, "Control transmon id")->required();
  zz->add_option("--target", zz_args.target, "Target transmon id")->required();
  zz->add_option("--levels", zz_args.levels, "Control levels (table columns)")->check(CLI::PositiveNumber);
  zz->add_option("--transitions", zz_args.transitions, "Target transitions (default: --levels)");
  zz->add_option("--trunc", zz_args.trunc, "Levels kept per transmon");
  zz->add_option("--j", zz_args.j, "Coupling in GHz (default: from the device file)");
  zz->callback([&] { action = [&] { run_zz(zz_args); }; });

  auto* readout = app.add_subcommand("readout", "Synthetic multi-tone readout and state discrimination");
  readout->require_subcommand(1);
  SimArgs sim_args;
  auto* sim = readout->add_subcommand("sim", "Synthesize labelled single shots");
  sim->add_option("device", sim_args.device, "Device file")->required();
  sim->add_option("--transmon", sim_args.transmon, "Transmon id");
  sim->add_option("--tone-set", sim_args.tone_set, "Tone set id (default: the transmon's)");
  sim->add_option("--states", sim_args.states, "Prepared states 0..N-1")->check(CLI::Range(2, 64));
  sim->add_option("--shots", sim_args.shots, "Shots per state")->check(CLI::NonNegativeNumber);
  sim->add_option("--sigma", sim_args.sigma, "Noise width per quadrature (overrides --sigma-fraction)");
  sim->add_option("--sigma-fraction", sim_args.sigma_fraction, "Noise width as a fraction of the smallest cluster separation");
  sim->add_flag("--decay", sim_args.decay, "Apply T1 decay from the device file");
  sim->add_option("--output", sim_args.output, "Shot file name (.csv for CSV, otherwise binary)");
  sim->callback([&] { action = [&] { run_readout_sim(sim_args); }; });

  TrainArgs train_args;
  auto* tr = readout->add_subcommand("train", "Train a Gaussian classifier on labelled shots");
  tr->add_option("--shots", train_args.shots, "Shot file")->required();
  tr->add_option("--output", train_args.output, "Classifier file name");
  tr->add_flag("--shared-covariance", train_args.shared, "Pool the covariance over states");
  tr->add_flag("--mixture-weights", train_args.weights, "Use class frequencies as priors");
  tr->add_flag("--em", train_args.em, "Refine with unsupervised EM");
  tr->add_option("--folds", train_args.folds, "Also report k-fold cross-validated fidelity");
  tr->callback([&] { action = [&] { run_readout_train(train_args); }; });

  ClassifyArgs cls_args;
  auto* cls = readout->add_subcommand("classify", "Assign states to shots");
  cls->add_option("--classifier", cls_args.classifier, "Classifier file")->required();
  cls->add_option("--shots", cls_args.shots, "Shot file")->required();
  cls->callback([&] { action = [&] { run_readout_classify(cls_args); }; });

  ClassifyArgs conf_args;
  auto* conf = readout->add_subcommand("confusion", "Assignment matrix of labelled shots");
  conf->add_option("--classifier", conf_args.classifier, "Classifier file")->required();
  conf->add_option("--shots", conf_args.shots, "Shot file")->required();
  conf->callback([&] { action = [&] { run_readout_confusion(conf_args); }; });

  BudgetArgs budget_args;
  auto* budget = app.add_subcommand("t1-budget", "Quasiparticle, Purcell and dielectric T1 limits per level");
  budget->add_option("device", budget_args.device, "Device file")->required();
  budget->add_option("--transmon", budget_args.transmon, "Transmon id");
  budget->add_option("--levels", budget_args.levels, "Highest level i (default: measured count, at least 9)");
  budget->add_option("--t1-csv", budget_args.t1_csv, "Measured T1 as level,T1_us,uncertainty_us");
  budget->add_flag("--fit-dielectric", budget_args.fit_dielectric, "Fit Q_diel,0 and epsilon to measured T1");
  budget->add_flag("--weighted", budget_args.weighted, "Weight the dielectric fit by measurement uncertainty");
  budget->callback([&] { action = [&] { run_t1_budget(budget_args); }; });

  SeriesArgs rb_args;
  auto* rb = app.add_subcommand("rb-fit", "Fit A r^m + C to (depth, survival) data");
  rb->add_option("--data", rb_args.data, "CSV of depth,survival")->required();
  rb->add_option("--d", rb_args.d, "Subspace dimension for the error per Clifford")->check(CLI::Range(2, 64));
  rb->callback([&] { action = [&] { run_rb_fit(rb_args); }; });

  SeriesArgs ramsey_args;
  auto* ramsey = app.add_subcommand("ramsey-fit", "Fit a two-frequency Ramsey beat to (time, population) data");
  ramsey->add_option("--data", ramsey_args.data, "CSV of t_us,population")->required();
  ramsey->callback([&] { action = [&] { run_ramsey_fit(ramsey_args); }; });

  auto* tomo = app.add_subcommand("tomo", "Qudit state tomography");
  tomo->require_subcommand(1);
  TomoArgs gates_args;
  auto* gates = tomo->add_subcommand("gates", "List the tomography pre-rotations");
  gates->add_option("--d", gates_args.d, "Qudit dimension")->required()->check(CLI::Range(2, 32));
  gates->callback([&] { action = [&] { run_tomo_gates(gates_args); }; });
  TomoArgs rec_args;
  auto* rec = tomo->add_subcommand("reconstruct", "Reconstruct a density matrix from outcome probabilities");
  rec->add_option("--d", rec_args.d, "Qudit dimension")->required()->check(CLI::Range(2, 32));
  rec->add_option("--probs", rec_args.probs, "CSV of gate,p0,...,p(d-1)")->required();
  rec->callback([&] { action = [&] { run_tomo_reconstruct(rec_args); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(category_name(ErrorCategory::input), e.what());
    return exit_code(ErrorCategory::input);
  }

  try {
    fs::create_directories(g_opts.out_dir);
    action();
  } catch (const Error& e) {
    print_error(category_name(e.category()), e.what());
    return exit_code(e.category());
  } catch (const std::exception& e) {
    print_error(category_name(ErrorCategory::numerical), e.what());
    return exit_code(ErrorCategory::numerical);
  }
  return 0;
}
