#pragma once

#include "tqd/hamiltonian.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tqd {

struct ResonatorModel {
  double f_r = 0.0;    // bare resonator frequency, GHz
  double g = 0.0;      // transmon-resonator coupling, GHz
  double kappa = 0.0;  // total linewidth, GHz (ordinary frequency)
  std::optional<std::pair<double, double>> kappa_split;  // (internal, coupling)

  void validate() const;

  friend bool operator==(const ResonatorModel&, const ResonatorModel&) = default;
};

struct PairChi {
  double value = 0.0;
  bool dispersive_breakdown = false;  // |f_i - f_i' - f_r| < kappa
};

// chi_{ii'} = g^2 |<i|n|i'>|^2 / (f_i - f_i' - f_r)
PairChi chi_pairwise(const EigenSolution& sol, const ResonatorModel& res, int i, int ip);

/// Second-order dispersive quantities for the lowest `levels` transmon states.
struct DispersiveReport {
  std::vector<double> chi;        // chi_i = sum_i' (chi_ii' - chi_i'i)
  std::vector<double> lamb;       // f~_i = f_i + sum_i' chi_ii'
  std::vector<double> delta_chi;  // chi_i - chi_{i-1}; entry 0 is NaN
  int window = 0;                 // number of transmon levels summed over
  double tail_bound = 0.0;        // largest single contribution of the last level in the window, GHz
  std::vector<std::string> warnings;

  // Resonator frequency with the transmon in |i>, f_r + chi_i.
  double resonator_frequency(const ResonatorModel& res, int i) const { return res.f_r + chi.at(i); }
  // Lamb-shifted transition f~_{i+1} - f~_i.
  double dressed_transition(int i) const { return lamb.at(i + 1) - lamb.at(i); }
};

inline constexpr double kTailTolerance = 1.0e-6;  // 1 kHz
inline constexpr double kDressedLabelOverlap = 0.75;  // below this a dressed label is ambiguous

// Sums are taken over (levels + 5) transmon states and widened in steps of 5
// while the tail contribution exceeds 1 kHz.
DispersiveReport stark_and_lamb(const EigenSolution& sol, const ResonatorModel& res, int levels);

/// Exact joint diagonalization of transmon + resonator with coupling
/// g n (a + a^dagger) (the i g n (a^dagger - a) form after a -> i a).
/// States are labelled by the largest overlap with bare |i>|k>.
class DressedTable {
public:
  DressedTable(int n_transmon, int n_photon, Eigen::VectorXd energies, Eigen::MatrixXd label_energy,
               Eigen::MatrixXd label_overlap);

  int transmon_levels() const { return n_transmon_; }
  int photon_cutoff() const { return n_photon_; }
  const Eigen::VectorXd& energies() const { return energies_; }

  double overlap(int i, int k) const;
  // Throws degeneracy when |i,k> has no eigenstate with overlap >= kDressedLabelOverlap.
  double energy(int i, int k) const;
  double pull(int i) const { return energy(i, 1) - energy(i, 0); }

private:
  int n_transmon_;
  int n_photon_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXd label_energy_;
  Eigen::MatrixXd label_overlap_;
};

// Validates labels eagerly for i < n_transmon / 2 and k <= n_photon / 2.
DressedTable dressed_oracle(const TransmonModel& model, const ResonatorModel& res, int n_transmon, int n_photon);

}  // namespace tqd
