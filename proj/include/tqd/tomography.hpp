#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace tqd {

enum class Axis { x, y };

/// Rotation exp(-i angle sigma/2) on the {level, level+1} subspace.
struct SubspaceRotation {
  int level = 0;
  Axis axis = Axis::x;
  double angle = 0.0;  // rad

  friend bool operator==(const SubspaceRotation&, const SubspaceRotation&) = default;
};

/// Rotations in operator order: the last element acts first. The empty
/// sequence is the identity.
struct GateSequence {
  std::vector<SubspaceRotation> ops;

  // "I" or e.g. "X01:90;X12:180", angles in degrees.
  std::string mnemonic() const;
  static GateSequence parse(const std::string& text);

  friend bool operator==(const GateSequence&, const GateSequence&) = default;
};

Eigen::MatrixXcd subspace_unitary(int d, int i, Axis axis, double angle);
Eigen::MatrixXcd sequence_unitary(int d, const GateSequence& g);

// Identity, then for each k = 1..d-1 and i = 0..d-1-k the X and Y pi/2
// readouts of rho_{i,i+k}, preceded by the X_pi chain that maps it down.
std::vector<GateSequence> tomography_gate_set(int d);

using DensityMatrix = Eigen::MatrixXcd;

// probs(g, i) = <i| U_g rho U_g^dagger |i>
Eigen::MatrixXd ideal_probabilities(const DensityMatrix& rho, const std::vector<GateSequence>& gates);

// Least squares over Hermitian unit-trace matrices, then the spectrum is
// shifted and clipped onto the probability simplex (trace renormalized).
DensityMatrix reconstruct_state(const Eigen::MatrixXd& probs, const std::vector<GateSequence>& gates);

double state_fidelity(const DensityMatrix& rho, const Eigen::VectorXcd& psi);

}  // namespace tqd
