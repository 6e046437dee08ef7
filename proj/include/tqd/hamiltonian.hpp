#pragma once

#include <Eigen/Dense>

#include <vector>

namespace tqd {

inline constexpr int kDefaultCutoff = 40;
inline constexpr int kMaxCutoff = 200;

/// A single transmon, standard (one harmonic) or with Josephson harmonics.
///
/// `e_j[m-1]` multiplies -cos(m*phi). Energies are E/h in GHz. The charge
/// basis runs over n = -cutoff..cutoff.
struct TransmonModel {
  double e_c = 0.0;
  std::vector<double> e_j;
  double n_g = 0.0;
  int cutoff = kDefaultCutoff;
  bool alternating = false;  // require sign(e_j[m-1]) = (-1)^(m+1)

  int harmonics() const { return static_cast<int>(e_j.size()); }
  int dimension() const { return 2 * cutoff + 1; }

  // Throws invalid_model on violated field invariants.
  void validate() const;
  // Additionally requires cutoff >= 2 * levels.
  void require_levels(int levels) const;

  TransmonModel with_offset(double offset) const;
  TransmonModel with_cutoff(int n) const;

  friend bool operator==(const TransmonModel&, const TransmonModel&) = default;
};

/// Lowest eigenpairs of a transmon Hamiltonian in the charge basis.
///
/// Eigenvectors are columns over n = -N..N, each with its largest-magnitude
/// component made positive so that matrix-element signs are reproducible.
class EigenSolution {
public:
  EigenSolution(TransmonModel model, Eigen::VectorXd energies, Eigen::MatrixXd vectors);

  const TransmonModel& model() const { return model_; }
  int levels() const { return static_cast<int>(energies_.size()); }

  const Eigen::VectorXd& energies() const { return energies_; }
  const Eigen::MatrixXd& vectors() const { return vectors_; }
  double energy(int i) const;
  double transition(int i) const { return energy(i + 1) - energy(i); }

  // <i|n|j> for all retained levels.
  const Eigen::MatrixXd& charge_matrix() const { return charge_; }

private:
  TransmonModel model_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXd vectors_;
  Eigen::MatrixXd charge_;
};

Eigen::MatrixXd build_hamiltonian(const TransmonModel& model);

EigenSolution eigensolve(const TransmonModel& model, int levels);

double charge_matrix_element(const EigenSolution& sol, int i, int j);

// Smallest cutoff N for which every one of the lowest `levels` energies moves
// by less than `tol_ghz` when N grows to N + 10.
int convergence_check(const TransmonModel& model, int levels, double tol_ghz);

}  // namespace tqd
