#include "tqd/discriminate.hpp"

#include "tqd/error.hpp"
#include "tqd/kernels.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace tqd {

namespace {

using nlohmann::json;

constexpr double kLog2Pi = 1.8378770664093454836;

Eigen::VectorXd as_vector(const IQRecord& r) {
  return Eigen::Map<const Eigen::VectorXd>(r.values.data(), static_cast<Eigen::Index>(r.values.size()));
}

double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

Eigen::MatrixXd regularized(const Eigen::MatrixXd& cov) {
  const double lambda = 1e-6 * cov.trace() / static_cast<double>(cov.rows());
  Eigen::MatrixXd out = 0.5 * (cov + cov.transpose());
  out.diagonal().array() += lambda;
  return out;
}

int label_of(const IQRecord& r) {
  if (!r.true_label) fail(ErrorCategory::coverage, "training and test records need labels");
  return *r.true_label;
}

int argmax_lower(const Eigen::VectorXd& v) {
  int best = 0;
  for (int k = 1; k < v.size(); ++k)
    if (v(k) > v(best)) best = k;
  return best;
}

}  // namespace

GaussianClassifier::GaussianClassifier(std::vector<Eigen::VectorXd> means, std::vector<Eigen::MatrixXd> covariances,
                                       std::optional<std::vector<double>> weights, bool shared_covariance)
    : means_(std::move(means)),
      covariances_(std::move(covariances)),
      weights_(std::move(weights)),
      shared_(shared_covariance) {
  const int d = static_cast<int>(means_.size());
  if (d < 2) fail(ErrorCategory::input, "a classifier needs at least two states");
  if (static_cast<int>(covariances_.size()) != d) fail(ErrorCategory::input, "one covariance per state required");
  if (weights_ && static_cast<int>(weights_->size()) != d) fail(ErrorCategory::input, "one weight per state required");
  const int n = dim();
  if (n < 1 || n > kernels::kMaxKernelDim) fail(ErrorCategory::input, "record dimension out of range");
  for (int k = 0; k < d; ++k) {
    if (means_[k].size() != n || covariances_[k].rows() != n || covariances_[k].cols() != n)
      fail(ErrorCategory::input, "inconsistent classifier dimensions");
    if (!means_[k].allFinite()) fail(ErrorCategory::input, "classifier means must be finite");
    const Eigen::LLT<Eigen::MatrixXd> llt(covariances_[k]);
    if (llt.info() != Eigen::Success) {
      std::ostringstream os;
      os << "covariance of state " << k << " is not positive definite after regularization";
      fail(ErrorCategory::degeneracy, os.str());
    }
    const Eigen::MatrixXd l = llt.matrixL();
    const Eigen::MatrixXd w = l.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
    std::vector<double> rows(static_cast<std::size_t>(n * n));
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) rows[r * n + c] = c <= r ? w(r, c) : 0.0;
    whiten_.push_back(std::move(rows));
    const double weight = weights_ ? (*weights_)[k] : 1.0 / d;
    log_norm_.push_back(-l.diagonal().array().log().sum() - 0.5 * n * kLog2Pi + std::log(weight));
  }
}

Eigen::VectorXd GaussianClassifier::log_likelihoods(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) fail(ErrorCategory::input, "record length does not match the classifier dimension");
  Eigen::VectorXd out(states());
  const int n = dim();
  for (int k = 0; k < states(); ++k) {
    double q = 0.0;
    kernels::mahalanobis_scalar(x.data(), 1, 1, n, whiten_[k].data(), means_[k].data(), &q);
    out(k) = -0.5 * q + log_norm_[k];
  }
  return out;
}

namespace {

struct Stats {
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;
  std::vector<double> weights;
};

// Weighted moments; resp(i, k) is the weight of record i in state k.
Stats moments(const std::vector<Eigen::VectorXd>& xs, const Eigen::MatrixXd& resp, bool shared) {
  const int d = static_cast<int>(resp.cols());
  const int n = static_cast<int>(xs.front().size());
  Stats s;
  Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(n, n);
  double total = 0.0;
  for (int k = 0; k < d; ++k) {
    const double nk = resp.col(k).sum();
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < xs.size(); ++i) mu += resp(i, k) * xs[i];
    mu /= nk;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const Eigen::VectorXd z = xs[i] - mu;
      cov.noalias() += resp(i, k) * z * z.transpose();
    }
    pooled += cov;
    total += nk;
    s.means.push_back(mu);
    s.covs.push_back(cov / nk);
    s.weights.push_back(nk);
  }
  if (shared)
    for (auto& c : s.covs) c = pooled / total;
  for (auto& c : s.covs) c = regularized(c);
  for (double& w : s.weights) w /= total;
  return s;
}

}  // namespace

GaussianClassifier train(const std::vector<IQRecord>& records, const TrainOptions& options) {
  if (records.empty()) fail(ErrorCategory::coverage, "no training records");
  const std::size_t n = records.front().values.size();
  if (n == 0 || n % 2 != 0) fail(ErrorCategory::input, "records must hold I/Q pairs");
  int d = 0;
  for (const auto& r : records) {
    if (r.values.size() != n) fail(ErrorCategory::input, "training records have inconsistent lengths");
    const int label = label_of(r);
    if (label < 0) fail(ErrorCategory::input, "labels must be nonnegative");
    d = std::max(d, label + 1);
  }
  if (d < 2) fail(ErrorCategory::coverage, "training data must cover at least two states");

  std::vector<int> counts(d, 0);
  std::vector<Eigen::VectorXd> xs;
  Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(records.size()), d);
  for (std::size_t i = 0; i < records.size(); ++i) {
    xs.push_back(as_vector(records[i]));
    ++counts[*records[i].true_label];
    resp(static_cast<Eigen::Index>(i), *records[i].true_label) = 1.0;
  }
  for (int k = 0; k < d; ++k) {
    if (counts[k] < static_cast<int>(n) + 1) {
      std::ostringstream os;
      os << "state " << k << " has " << counts[k] << " training records; at least " << n + 1 << " needed";
      fail(ErrorCategory::coverage, os.str());
    }
  }

  Stats s = moments(xs, resp, options.shared_covariance);
  auto build = [&](const Stats& st) {
    std::optional<std::vector<double>> w;
    if (options.mixture_weights) w = st.weights;
    return GaussianClassifier(st.means, st.covs, w, options.shared_covariance);
  };
  GaussianClassifier clf = build(s);
  if (!options.em_refine) return clf;

  std::vector<IQRecord> unlabelled(records.begin(), records.end());
  double ll = mixture_log_likelihood(clf, unlabelled);
  std::vector<double> history{ll};
  for (int it = 0; it < options.em_iterations; ++it) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const Eigen::VectorXd l = clf.log_likelihoods(xs[i]);
      resp.row(static_cast<Eigen::Index>(i)) = (l.array() - log_sum_exp(l)).exp().transpose();
    }
    bool collapsed = false;
    for (int k = 0; k < d; ++k) collapsed = collapsed || resp.col(k).sum() < static_cast<double>(n) + 1.0;
    if (collapsed) break;
    Stats next = moments(xs, resp, options.shared_covariance);
    GaussianClassifier candidate = build(next);
    const double ll_next = mixture_log_likelihood(candidate, unlabelled);
    // The ridge makes each M-step only approximately optimal; stop rather than accept a decrease.
    if (!(ll_next >= ll)) break;
    clf = std::move(candidate);
    const double gain = ll_next - ll;
    ll = ll_next;
    history.push_back(ll);
    if (gain <= 1e-10 * std::abs(ll)) break;
  }
  clf.em_history = std::move(history);
  return clf;
}

double mixture_log_likelihood(const GaussianClassifier& clf, const std::vector<IQRecord>& records) {
  double total = 0.0;
  for (const auto& r : records) total += log_sum_exp(clf.log_likelihoods(as_vector(r)));
  return total;
}

Classification classify(const GaussianClassifier& clf, const IQRecord& record) {
  Classification out;
  out.log_likelihoods = clf.log_likelihoods(as_vector(record));
  out.label = argmax_lower(out.log_likelihoods);
  return out;
}

std::vector<int> classify_batch(const GaussianClassifier& clf, const std::vector<IQRecord>& records) {
  const std::size_t count = records.size();
  const int n = clf.dim();
  // Dimension-major copy so the kernel streams contiguous lanes.
  std::vector<double> soa(static_cast<std::size_t>(n) * count);
  for (std::size_t i = 0; i < count; ++i) {
    if (static_cast<int>(records[i].values.size()) != n)
      fail(ErrorCategory::input, "record length does not match the classifier dimension");
    for (int c = 0; c < n; ++c) soa[c * count + i] = records[i].values[c];
  }
  std::vector<double> best(count, -std::numeric_limits<double>::infinity());
  std::vector<int> labels(count, 0);
  std::vector<double> q(count);
  for (int k = 0; k < clf.states(); ++k) {
    kernels::mahalanobis_batch(soa.data(), count, count, n, clf.whitening(k).data(), clf.means()[k].data(),
                               q.data());
    for (std::size_t i = 0; i < count; ++i) {
      const double l = -0.5 * q[i] + clf.log_norm(k);
      if (l > best[i]) {
        best[i] = l;
        labels[i] = k;
      }
    }
  }
  return labels;
}

AssignmentMatrix assignment_from_labels(const std::vector<int>& prepared, const std::vector<int>& assigned,
                                        int states) {
  if (prepared.size() != assigned.size()) fail(ErrorCategory::input, "label lists differ in length");
  AssignmentMatrix am;
  am.p = Eigen::MatrixXd::Zero(states, states);
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    if (prepared[i] < 0 || prepared[i] >= states || assigned[i] < 0 || assigned[i] >= states)
      fail(ErrorCategory::coverage, "label outside the classifier's state range");
    am.p(assigned[i], prepared[i]) += 1.0;
  }
  for (int j = 0; j < states; ++j) {
    const double total = am.p.col(j).sum();
    if (total == 0.0) fail(ErrorCategory::coverage, "no test records prepared in state " + std::to_string(j));
    am.p.col(j) /= total;
  }
  am.fidelity = am.p.diagonal().mean();
  return am;
}

AssignmentMatrix assignment_matrix(const GaussianClassifier& clf, const std::vector<IQRecord>& test) {
  std::vector<int> prepared;
  for (const auto& r : test) prepared.push_back(label_of(r));
  return assignment_from_labels(prepared, classify_batch(clf, test), clf.states());
}

namespace {

// Euclidean projection onto the probability simplex (sort-and-threshold).
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumulative += u[k];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0);
}

}  // namespace

Mitigation mitigate(const Eigen::VectorXd& measured, const AssignmentMatrix& am) {
  const Eigen::MatrixXd& a = am.p;
  if (a.rows() != a.cols() || a.rows() != measured.size())
    fail(ErrorCategory::input, "measured populations do not match the assignment matrix");
  Mitigation out;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  out.condition_number = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  if (out.condition_number > 1e6) {
    std::ostringstream os;
    os << "assignment matrix is ill-conditioned (condition number " << out.condition_number << ")";
    out.warnings.push_back(os.str());
  }

  // Accelerated projected gradient on 1/2 |A p - m|^2.
  const double lipschitz = std::max(sv(0) * sv(0), 1e-300);
  const Eigen::MatrixXd ata = a.transpose() * a;
  const Eigen::VectorXd atm = a.transpose() * measured;
  Eigen::VectorXd p = project_simplex(measured);
  Eigen::VectorXd y = p;
  double t = 1.0;
  for (int it = 0; it < 200000; ++it) {
    const Eigen::VectorXd next = project_simplex(y - (ata * y - atm) / lipschitz);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - p);
    const double change = (next - p).lpNorm<Eigen::Infinity>();
    p = next;
    t = t_next;
    if (change < 1e-15) break;
  }
  out.populations = p;
  return out;
}

CrossValidation kfold_fidelity(const std::vector<IQRecord>& records, int folds, const TrainOptions& options,
                               std::uint64_t seed) {
  if (folds < 2) fail(ErrorCategory::input, "cross-validation needs at least two folds");
  std::vector<std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const int label = label_of(records[i]);
    if (label < 0) fail(ErrorCategory::input, "labels must be nonnegative");
    if (static_cast<int>(by_label.size()) <= label) by_label.resize(label + 1);
    by_label[label].push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::vector<int> fold_of(records.size(), 0);
  for (auto& idx : by_label) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < idx.size(); ++k) fold_of[idx[k]] = static_cast<int>(k % folds);
  }
  CrossValidation out;
  for (int f = 0; f < folds; ++f) {
    std::vector<IQRecord> train_set, test_set;
    for (std::size_t i = 0; i < records.size(); ++i) (fold_of[i] == f ? test_set : train_set).push_back(records[i]);
    const GaussianClassifier clf = train(train_set, options);
    out.fold_fidelity.push_back(assignment_matrix(clf, test_set).fidelity);
  }
  out.mean_fidelity =
      std::accumulate(out.fold_fidelity.begin(), out.fold_fidelity.end(), 0.0) / static_cast<double>(folds);
  return out;
}

std::string classifier_to_json(const GaussianClassifier& clf) {
  json j;
  j["format"] = "tqd-gaussian-classifier";
  j["version"] = kClassifierFormatVersion;
  j["states"] = clf.states();
  j["dim"] = clf.dim();
  j["shared_covariance"] = clf.shared_covariance();
  json means = json::array(), covs = json::array();
  for (int k = 0; k < clf.states(); ++k) {
    means.push_back(std::vector<double>(clf.means()[k].data(), clf.means()[k].data() + clf.dim()));
    json rows = json::array();
    for (int r = 0; r < clf.dim(); ++r) {
      std::vector<double> row(clf.dim());
      for (int c = 0; c < clf.dim(); ++c) row[c] = clf.covariances()[k](r, c);
      rows.push_back(row);
    }
    covs.push_back(rows);
  }
  j["means"] = means;
  j["covariances"] = covs;
  j["weights"] = clf.weights() ? json(*clf.weights()) : json(nullptr);
  return j.dump(2);
}

GaussianClassifier classifier_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "tqd-gaussian-classifier") fail(ErrorCategory::input, "not a classifier file");
    if (j.at("version").get<int>() != kClassifierFormatVersion)
      fail(ErrorCategory::input, "unsupported classifier version " + j.at("version").dump());
    const int d = j.at("states").get<int>();
    const int n = j.at("dim").get<int>();
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covs;
    for (int k = 0; k < d; ++k) {
      const auto m = j.at("means").at(k).get<std::vector<double>>();
      if (static_cast<int>(m.size()) != n) fail(ErrorCategory::input, "mean has the wrong length");
      means.push_back(Eigen::Map<const Eigen::VectorXd>(m.data(), n));
      Eigen::MatrixXd c(n, n);
      for (int r = 0; r < n; ++r) {
        const auto row = j.at("covariances").at(k).at(r).get<std::vector<double>>();
        if (static_cast<int>(row.size()) != n) fail(ErrorCategory::input, "covariance row has the wrong length");
        for (int col = 0; col < n; ++col) c(r, col) = row[col];
      }
      covs.push_back(c);
    }
    std::optional<std::vector<double>> weights;
    if (!j.at("weights").is_null()) weights = j.at("weights").get<std::vector<double>>();
    return GaussianClassifier(std::move(means), std::move(covs), std::move(weights),
                              j.value("shared_covariance", false));
  } catch (const json::exception& e) {
    fail(ErrorCategory::input, std::string("bad classifier file: ") + e.what());
  }
}

void save_classifier(const std::string& path, const GaussianClassifier& clf) {
  std::ofstream os(path);
  if (!os) fail(ErrorCategory::input, "cannot write " + path);
  os << classifier_to_json(clf) << "\n";
}

GaussianClassifier load_classifier(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCategory::input, "cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return classifier_from_json(ss.str());
}

}  // namespace tqd
