#include "tqd/coupling.hpp"

#include "tqd/error.hpp"
#include "tqd/optimize.hpp"

#include <cmath>
#include <sstream>

namespace tqd {

JointSolution::JointSolution(int trunc_a, int trunc_b, double j, Eigen::VectorXd energies,
                             Eigen::MatrixXd label_energy, Eigen::MatrixXd label_overlap,
                             std::vector<std::string> collisions, std::vector<std::string> warnings)
    : trunc_a_(trunc_a),
      trunc_b_(trunc_b),
      j_(j),
      energies_(std::move(energies)),
      label_energy_(std::move(label_energy)),
      label_overlap_(std::move(label_overlap)),
      collisions_(std::move(collisions)),
      warnings_(std::move(warnings)) {}

double JointSolution::overlap(int i, int j) const {
  if (i < 0 || i >= trunc_a_ || j < 0 || j >= trunc_b_)
    fail(ErrorCategory::input, "product state outside the joint truncation");
  return label_overlap_(i, j);
}

double JointSolution::energy(int i, int j) const {
  if (overlap(i, j) < 0.5) {
    std::ostringstream os;
    os << "ambiguous label for |" << i << "," << j << "> (overlap " << label_overlap_(i, j) << ")";
    const std::string& other = collisions_[static_cast<std::size_t>(i * trunc_b_ + j)];
    if (!other.empty()) os << ", mixed with " << other;
    fail(ErrorCategory::degeneracy, os.str());
  }
  return label_energy_(i, j);
}

JointSolution build_joint(const EigenSolution& a, const EigenSolution& b, double j, int trunc) {
  if (trunc < 2) fail(ErrorCategory::input, "joint truncation needs at least two levels per transmon");
  if (trunc > a.levels() || trunc > b.levels())
    fail(ErrorCategory::input, "joint truncation exceeds the levels retained by an input solution");

  const Eigen::MatrixXd na = a.charge_matrix().topLeftCorner(trunc, trunc);
  const Eigen::MatrixXd nb = b.charge_matrix().topLeftCorner(trunc, trunc);
  const int dim = trunc * trunc;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < trunc; ++i)
    for (int k = 0; k < trunc; ++k) {
      const int row = i * trunc + k;
      h(row, row) = a.energy(i) + b.energy(k);
      for (int ip = 0; ip < trunc; ++ip)
        for (int kp = 0; kp < trunc; ++kp) h(row, ip * trunc + kp) += j * na(i, ip) * nb(k, kp);
    }

  std::vector<std::string> warnings;
  for (int i = 0; i + 1 < trunc; ++i)
    for (int k = 0; k + 1 < trunc; ++k) {
      const double detuning = std::abs(a.transition(i) - b.transition(k));
      const double element = std::abs(j * na(i, i + 1) * nb(k, k + 1));
      if (element > 0.1 * detuning) {
        std::ostringstream os;
        os << "coupling " << element << " GHz is not small against detuning " << detuning
           << " GHz between a:" << i << "-" << i + 1 << " and b:" << k << "-" << k + 1;
        warnings.push_back(os.str());
      }
    }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) fail(ErrorCategory::numerical, "joint eigensolver did not converge");
  const Eigen::MatrixXd weights = solver.eigenvectors().cwiseAbs2();

  Eigen::MatrixXd label_energy(trunc, trunc);
  Eigen::MatrixXd label_overlap(trunc, trunc);
  std::vector<std::string> collisions(dim);
  for (int p = 0; p < dim; ++p) {
    Eigen::Index best = 0;
    const double ov = weights.row(p).maxCoeff(&best);
    label_energy(p / trunc, p % trunc) = solver.eigenvalues()(best);
    label_overlap(p / trunc, p % trunc) = ov;
    if (ov < 0.5) {
      // The product state competing for the same eigenstate.
      Eigen::VectorXd column = weights.col(best);
      column(p) = -1.0;
      Eigen::Index rival = 0;
      column.maxCoeff(&rival);
      collisions[p] = "|" + std::to_string(rival / trunc) + "," + std::to_string(rival % trunc) + ">";
    }
  }
  return JointSolution(trunc, trunc, j, solver.eigenvalues(), std::move(label_energy), std::move(label_overlap),
                       std::move(collisions), std::move(warnings));
}

ZZShiftMatrix zz_shift_matrix(const JointSolution& joint, int control_levels, int target_transitions) {
  if (control_levels < 1 || target_transitions < 1)
    fail(ErrorCategory::input, "shift matrix needs at least one control level and one target transition");
  if (control_levels > joint.trunc_b() || target_transitions + 1 > joint.trunc_a())
    fail(ErrorCategory::input, "shift matrix exceeds the joint truncation");
  ZZShiftMatrix out;
  out.j = joint.coupling();
  out.shifts.resize(target_transitions, control_levels);
  for (int i = 0; i < target_transitions; ++i) {
    const double base = joint.energy(i + 1, 0) - joint.energy(i, 0);
    out.shifts(i, 0) = 0.0;
    for (int c = 1; c < control_levels; ++c)
      out.shifts(i, c) = (joint.energy(i + 1, c) - joint.energy(i, c)) - base;
  }
  return out;
}

double fit_j_from_shift(const EigenSolution& a, const EigenSolution& b, double measured, int trunc) {
  if (measured == 0.0 || !std::isfinite(measured))
    fail(ErrorCategory::input, "measured shift must be finite and nonzero");
  auto shift = [&](double j) { return zz_shift_matrix(build_joint(a, b, j, trunc), 2, 1).shifts(0, 1); };

  // Second-order scaling from a reference coupling gives the bracket centre.
  const double j_ref = 1e-3;
  const double s_ref = shift(j_ref);
  if (s_ref == 0.0 || std::signbit(s_ref) != std::signbit(measured)) {
    std::ostringstream os;
    os << "measured shift " << measured << " GHz has the wrong sign for this pair (model gives " << s_ref
       << " GHz at J = 1 MHz)";
    fail(ErrorCategory::fit, os.str());
  }
  const double guess = j_ref * std::sqrt(measured / s_ref);
  auto residual = [&](double j) { return shift(j) - measured; };
  const double j = optimize::find_root(residual, guess / 3.0, guess * 3.0, 1e-12);
  if (std::abs(residual(j)) > 1e-6) fail(ErrorCategory::fit, "J inversion did not reach 1 kHz");
  return j;
}

}  // namespace tqd
