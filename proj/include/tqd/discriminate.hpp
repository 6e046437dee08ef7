#pragma once

#include "tqd/readout.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tqd {

struct TrainOptions {
  bool shared_covariance = false;  // pooled within-class covariance
  bool mixture_weights = false;    // use class frequencies as priors (updated by EM)
  bool em_refine = false;          // unsupervised EM pass seeded by the labelled fit
  int em_iterations = 50;
};

/// Quadratic discriminant over IQ records: one Gaussian per prepared state.
class GaussianClassifier {
public:
  GaussianClassifier(std::vector<Eigen::VectorXd> means, std::vector<Eigen::MatrixXd> covariances,
                     std::optional<std::vector<double>> weights, bool shared_covariance = false);

  int states() const { return static_cast<int>(means_.size()); }
  int dim() const { return static_cast<int>(means_.front().size()); }
  const std::vector<Eigen::VectorXd>& means() const { return means_; }
  const std::vector<Eigen::MatrixXd>& covariances() const { return covariances_; }
  const std::optional<std::vector<double>>& weights() const { return weights_; }
  bool shared_covariance() const { return shared_; }

  // log N(x; mu_k, Sigma_k) + log w_k for every state.
  Eigen::VectorXd log_likelihoods(const Eigen::VectorXd& x) const;

  // Log-likelihood of the training data after each EM iteration (empty without EM).
  std::vector<double> em_history;

  // Row-major inverse Cholesky factor of state k's covariance.
  const std::vector<double>& whitening(int k) const { return whiten_[k]; }
  // -log det L_k - dim/2 log 2pi + log w_k
  double log_norm(int k) const { return log_norm_[k]; }

private:
  std::vector<Eigen::VectorXd> means_;
  std::vector<Eigen::MatrixXd> covariances_;
  std::optional<std::vector<double>> weights_;
  bool shared_;
  std::vector<std::vector<double>> whiten_;
  std::vector<double> log_norm_;
};

GaussianClassifier train(const std::vector<IQRecord>& records, const TrainOptions& options = {});

struct Classification {
  int label = 0;
  Eigen::VectorXd log_likelihoods;
};

// Largest log-likelihood; exact ties go to the lower state index.
Classification classify(const GaussianClassifier& clf, const IQRecord& record);
// Same rule over many records, using the dispatched distance kernel.
std::vector<int> classify_batch(const GaussianClassifier& clf, const std::vector<IQRecord>& records);

// Total log-likelihood of unlabelled data under the mixture.
double mixture_log_likelihood(const GaussianClassifier& clf, const std::vector<IQRecord>& records);

struct AssignmentMatrix {
  Eigen::MatrixXd p;  // p(i, j) = P(assigned i | prepared j)
  double fidelity = 0.0;
};

AssignmentMatrix assignment_matrix(const GaussianClassifier& clf, const std::vector<IQRecord>& test);
AssignmentMatrix assignment_from_labels(const std::vector<int>& prepared, const std::vector<int>& assigned,
                                        int states);

struct Mitigation {
  Eigen::VectorXd populations;
  double condition_number = 0.0;
  std::vector<std::string> warnings;
};

// argmin |P p - m|^2 over the probability simplex.
Mitigation mitigate(const Eigen::VectorXd& measured, const AssignmentMatrix& am);

struct CrossValidation {
  std::vector<double> fold_fidelity;
  double mean_fidelity = 0.0;
};

// Stratified k-fold estimate of assignment fidelity.
CrossValidation kfold_fidelity(const std::vector<IQRecord>& records, int folds, const TrainOptions& options,
                               std::uint64_t seed);

inline constexpr int kClassifierFormatVersion = 1;
std::string classifier_to_json(const GaussianClassifier& clf);
GaussianClassifier classifier_from_json(const std::string& text);
void save_classifier(const std::string& path, const GaussianClassifier& clf);
GaussianClassifier load_classifier(const std::string& path);

}  // namespace tqd
