#include "tqd/hamiltonian.hpp"

#include "tqd/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace tqd {

void TransmonModel::validate() const {
  if (!(e_c > 0.0) || !std::isfinite(e_c)) fail(ErrorCategory::invalid_model, "e_c must be positive");
  if (e_j.empty()) fail(ErrorCategory::invalid_model, "e_j must hold at least one harmonic");
  // e_j[0] == 0 is the free rotor, kept admissible for closed-form checks.
  if (!(e_j[0] >= 0.0)) fail(ErrorCategory::invalid_model, "e_j[0] must be non-negative");
  for (double e : e_j) {
    if (!std::isfinite(e)) fail(ErrorCategory::invalid_model, "e_j entries must be finite");
  }
  if (!std::isfinite(n_g)) fail(ErrorCategory::invalid_model, "n_g must be finite");
  if (cutoff < 1) fail(ErrorCategory::invalid_model, "cutoff must be at least 1");
  if (alternating) {
    for (int m = 1; m <= harmonics(); ++m) {
      const double expected = (m % 2 == 1) ? 1.0 : -1.0;
      if (e_j[m - 1] * expected < 0.0) {
        fail(ErrorCategory::invalid_model, "harmonic E_J" + std::to_string(m) + " breaks sign alternation");
      }
    }
  }
}

void TransmonModel::require_levels(int levels) const {
  validate();
  if (cutoff < 2 * levels) {
    fail(ErrorCategory::invalid_model, "cutoff " + std::to_string(cutoff) + " is below twice the " +
                                           std::to_string(levels) + " requested levels");
  }
}

TransmonModel TransmonModel::with_offset(double offset) const {
  TransmonModel m = *this;
  m.n_g = offset;
  return m;
}

TransmonModel TransmonModel::with_cutoff(int n) const {
  TransmonModel m = *this;
  m.cutoff = n;
  return m;
}

EigenSolution::EigenSolution(TransmonModel model, Eigen::VectorXd energies, Eigen::MatrixXd vectors)
    : model_(std::move(model)), energies_(std::move(energies)), vectors_(std::move(vectors)) {
  const int dim = static_cast<int>(vectors_.rows());
  Eigen::VectorXd n(dim);
  for (int k = 0; k < dim; ++k) n(k) = static_cast<double>(k - model_.cutoff);
  charge_ = vectors_.transpose() * n.asDiagonal() * vectors_;
}

double EigenSolution::energy(int i) const {
  if (i < 0 || i >= levels()) fail(ErrorCategory::input, "level " + std::to_string(i) + " not retained");
  return energies_(i);
}

Eigen::MatrixXd build_hamiltonian(const TransmonModel& model) {
  model.validate();
  const int n_max = model.cutoff;
  if (n_max < model.harmonics()) {
    fail(ErrorCategory::invalid_model, "cutoff " + std::to_string(n_max) + " is below the highest harmonic " +
                                           std::to_string(model.harmonics()));
  }
  const int dim = model.dimension();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    const double q = static_cast<double>(k - n_max) - model.n_g;
    h(k, k) = 4.0 * model.e_c * q * q;
  }
  for (int m = 1; m <= model.harmonics(); ++m) {
    const double off = -0.5 * model.e_j[m - 1];
    for (int k = 0; k + m < dim; ++k) {
      h(k, k + m) = off;
      h(k + m, k) = off;
    }
  }
  return h;
}

EigenSolution eigensolve(const TransmonModel& model, int levels) {
  const Eigen::MatrixXd h = build_hamiltonian(model);
  if (levels < 1 || levels > h.rows()) {
    fail(ErrorCategory::input, "requested " + std::to_string(levels) + " levels from a basis of dimension " +
                                   std::to_string(h.rows()));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "symmetric eigensolver did not converge (dimension " << h.rows() << ", status "
       << static_cast<int>(es.info()) << ", max iterations "
       << Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>::m_maxIterations << " per eigenvalue)";
    fail(ErrorCategory::numerical, os.str());
  }
  Eigen::VectorXd energies = es.eigenvalues().head(levels);
  Eigen::MatrixXd vectors = es.eigenvectors().leftCols(levels);
  for (int c = 0; c < levels; ++c) {
    Eigen::Index arg = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, c) < 0.0) vectors.col(c) *= -1.0;
  }
  return EigenSolution(model, std::move(energies), std::move(vectors));
}

double charge_matrix_element(const EigenSolution& sol, int i, int j) {
  if (i < 0 || j < 0 || i >= sol.levels() || j >= sol.levels()) {
    fail(ErrorCategory::input, "charge matrix element index out of range");
  }
  return sol.charge_matrix()(i, j);
}

int convergence_check(const TransmonModel& model, int levels, double tol_ghz) {
  if (!(tol_ghz > 0.0)) fail(ErrorCategory::input, "tolerance must be positive");
  model.validate();
  const int start = std::max({model.harmonics(), (levels - 1 + 1) / 2, 1});
  double worst = 0.0;
  for (int n = start; n <= kMaxCutoff; ++n) {
    const auto a = eigensolve(model.with_cutoff(n), levels);
    const auto b = eigensolve(model.with_cutoff(n + 10), levels);
    worst = (a.energies() - b.energies()).cwiseAbs().maxCoeff();
    if (worst < tol_ghz) return n;
  }
  std::ostringstream os;
  os << "no cutoff up to " << kMaxCutoff << " converges " << levels << " levels to " << tol_ghz
     << " GHz (last shift " << worst << " GHz)";
  fail(ErrorCategory::numerical, os.str());
}

}  // namespace tqd
