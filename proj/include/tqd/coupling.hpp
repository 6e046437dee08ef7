#pragma once

#include "tqd/hamiltonian.hpp"

#include <string>
#include <vector>

namespace tqd {

inline constexpr int kDefaultJointTruncation = 12;

/// Two capacitively coupled transmons in the product of their eigenbases,
/// H = E_a (x) 1 + 1 (x) E_b + J n_a (x) n_b.
///
/// Product state |i>|j> has transmon a in level i, b in level j. Each product
/// state is matched to the eigenstate it overlaps most; the match is usable
/// only when that overlap is at least 1/2.
class JointSolution {
public:
  JointSolution(int trunc_a, int trunc_b, double j, Eigen::VectorXd energies, Eigen::MatrixXd label_energy,
                Eigen::MatrixXd label_overlap, std::vector<std::string> collisions,
                std::vector<std::string> warnings);

  int trunc_a() const { return trunc_a_; }
  int trunc_b() const { return trunc_b_; }
  double coupling() const { return j_; }
  const Eigen::VectorXd& energies() const { return energies_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  double overlap(int i, int j) const;
  // Throws degeneracy naming the competing product state when ambiguous.
  double energy(int i, int j) const;

private:
  int trunc_a_;
  int trunc_b_;
  double j_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXd label_energy_;
  Eigen::MatrixXd label_overlap_;
  std::vector<std::string> collisions_;  // per product state, empty when well labelled
  std::vector<std::string> warnings_;
};

JointSolution build_joint(const EigenSolution& a, const EigenSolution& b, double j,
                          int trunc = kDefaultJointTruncation);

/// shifts(i, j) = Delta f^{|j>}_{i,i+1}: how far the target's i <-> i+1
/// transition moves when the control sits in |j> instead of |0>.
/// Transmon a of the joint solution is the target, b the control.
struct ZZShiftMatrix {
  Eigen::MatrixXd shifts;  // rows: target transitions, columns: control states
  std::string control_id;
  std::string target_id;
  double j = 0.0;

  // Delta f^{|hi>}_{i,i+1} - Delta f^{|lo>}_{i,i+1}
  double effective_zz(int i, int lo, int hi) const { return shifts(i, hi) - shifts(i, lo); }
};

ZZShiftMatrix zz_shift_matrix(const JointSolution& joint, int control_levels, int target_transitions);

// J reproducing a measured Delta f^{|1>}_{01} of target a with control b.
double fit_j_from_shift(const EigenSolution& a, const EigenSolution& b, double measured,
                        int trunc = kDefaultJointTruncation);

}  // namespace tqd
