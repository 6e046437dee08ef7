#include "tqd/dispersive.hpp"

#include "tqd/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tqd {

void ResonatorModel::validate() const {
  if (!(f_r > 0.0)) fail(ErrorCategory::invalid_model, "resonator frequency must be positive");
  if (!(kappa > 0.0)) fail(ErrorCategory::invalid_model, "resonator linewidth must be positive");
  if (!std::isfinite(g)) fail(ErrorCategory::invalid_model, "coupling must be finite");
  if (kappa_split) {
    const auto [internal, coupling] = *kappa_split;
    if (internal < 0.0 || coupling < 0.0 || std::abs(internal + coupling - kappa) > 1e-9) {
      fail(ErrorCategory::invalid_model, "kappa split must be non-negative and sum to kappa");
    }
  }
}

namespace {

double pair_value(const EigenSolution& s, const ResonatorModel& res, int i, int ip) {
  const double n = s.charge_matrix()(i, ip);
  return res.g * res.g * n * n / (s.energy(i) - s.energy(ip) - res.f_r);
}

}  // namespace

PairChi chi_pairwise(const EigenSolution& sol, const ResonatorModel& res, int i, int ip) {
  if (i < 0 || ip < 0 || i >= sol.levels() || ip >= sol.levels()) {
    fail(ErrorCategory::input, "chi_pairwise level out of range");
  }
  const double denom = sol.energy(i) - sol.energy(ip) - res.f_r;
  return {pair_value(sol, res, i, ip), std::abs(denom) < res.kappa};
}

DispersiveReport stark_and_lamb(const EigenSolution& sol, const ResonatorModel& res, int levels) {
  res.validate();
  if (levels < 1) fail(ErrorCategory::input, "need at least one level");
  const int dim = sol.model().dimension();
  int window = std::min(levels + 5, dim);
  if (window < levels + 2) fail(ErrorCategory::numerical, "basis too small for the requested dispersive window");

  while (true) {
    const EigenSolution s = sol.levels() >= window ? sol : eigensolve(sol.model(), window);
    DispersiveReport r;
    r.window = window;
    r.chi.assign(levels, 0.0);
    r.lamb.assign(levels, 0.0);
    double tail = 0.0;
    for (int i = 0; i < levels; ++i) {
      double lamb = s.energy(i);
      double chi = 0.0;
      for (int ip = 0; ip < window; ++ip) {
        const double forward = pair_value(s, res, i, ip);
        const double backward = pair_value(s, res, ip, i);
        lamb += forward;
        chi += forward - backward;
        if (ip == window - 1) tail = std::max({tail, std::abs(forward), std::abs(forward - backward)});
        const double n = s.charge_matrix()(i, ip);
        if (std::abs(n) > 1e-6) {
          for (double d : {s.energy(i) - s.energy(ip) - res.f_r, s.energy(ip) - s.energy(i) - res.f_r}) {
            if (std::abs(d) < res.kappa) {
              std::ostringstream os;
              os << "dispersive breakdown between levels " << i << " and " << ip << " (detuning " << d
                 << " GHz)";
              r.warnings.push_back(os.str());
            }
          }
        }
      }
      r.chi[i] = chi;
      r.lamb[i] = lamb;
    }
    r.tail_bound = tail;
    if (tail <= kTailTolerance) {
      r.delta_chi.assign(levels, std::numeric_limits<double>::quiet_NaN());
      for (int i = 1; i < levels; ++i) r.delta_chi[i] = r.chi[i] - r.chi[i - 1];
      return r;
    }
    if (window >= dim) {
      std::ostringstream os;
      os << "dispersive sum tail " << tail << " GHz exceeds 1 kHz at the basis limit of " << dim << " levels";
      fail(ErrorCategory::numerical, os.str());
    }
    window = std::min(window + 5, dim);
  }
}

DressedTable::DressedTable(int n_transmon, int n_photon, Eigen::VectorXd energies, Eigen::MatrixXd label_energy,
                           Eigen::MatrixXd label_overlap)
    : n_transmon_(n_transmon),
      n_photon_(n_photon),
      energies_(std::move(energies)),
      label_energy_(std::move(label_energy)),
      label_overlap_(std::move(label_overlap)) {}

double DressedTable::overlap(int i, int k) const {
  if (i < 0 || k < 0 || i >= n_transmon_ || k > n_photon_) fail(ErrorCategory::input, "dressed label out of range");
  return label_overlap_(i, k);
}

double DressedTable::energy(int i, int k) const {
  if (overlap(i, k) < kDressedLabelOverlap) {
    std::ostringstream os;
    os << "dressed state |" << i << "," << k << "> is ambiguous (max overlap " << label_overlap_(i, k) << ")";
    fail(ErrorCategory::degeneracy, os.str());
  }
  return label_energy_(i, k);
}

DressedTable dressed_oracle(const TransmonModel& model, const ResonatorModel& res, int n_transmon, int n_photon) {
  res.validate();
  if (n_transmon < 2 || n_photon < 1) fail(ErrorCategory::input, "dressed oracle needs >= 2 levels and >= 1 photon");
  const auto sol = eigensolve(model, n_transmon);
  const int np = n_photon + 1;
  const int dim = n_transmon * np;

  // Product basis index: i * np + k.
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  const auto& n = sol.charge_matrix();
  for (int i = 0; i < n_transmon; ++i) {
    for (int k = 0; k < np; ++k) {
      h(i * np + k, i * np + k) = sol.energy(i) + k * res.f_r;
      if (k + 1 < np) {
        const double amp = res.g * std::sqrt(static_cast<double>(k + 1));
        for (int j = 0; j < n_transmon; ++j) {
          h(i * np + k, j * np + k + 1) += amp * n(i, j);
          h(j * np + k + 1, i * np + k) += amp * n(i, j);
        }
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) fail(ErrorCategory::numerical, "dressed eigensolve did not converge");

  Eigen::MatrixXd label_energy = Eigen::MatrixXd::Constant(n_transmon, np, std::numeric_limits<double>::quiet_NaN());
  Eigen::MatrixXd label_overlap = Eigen::MatrixXd::Zero(n_transmon, np);
  for (int c = 0; c < dim; ++c) {
    Eigen::Index arg = 0;
    const double ov = es.eigenvectors().col(c).cwiseAbs2().maxCoeff(&arg);
    const int i = static_cast<int>(arg) / np;
    const int k = static_cast<int>(arg) % np;
    if (ov > label_overlap(i, k)) {
      label_overlap(i, k) = ov;
      label_energy(i, k) = es.eigenvalues()(c);
    }
  }
  DressedTable table(n_transmon, n_photon, es.eigenvalues(), std::move(label_energy), std::move(label_overlap));
  for (int i = 0; i < n_transmon / 2; ++i) {
    for (int k = 0; k <= n_photon / 2; ++k) (void)table.energy(i, k);
  }
  return table;
}

}  // namespace tqd
