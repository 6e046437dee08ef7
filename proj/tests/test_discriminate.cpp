#include "generators.hpp"
#include "tqd/discriminate.hpp"
#include "tqd/error.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

using namespace tqd;

namespace {

// Labelled Gaussian clouds with the given means and a shared spread.
std::vector<IQRecord> clouds(testgen::Rng& rng, const std::vector<Eigen::VectorXd>& means,
                             const std::vector<Eigen::MatrixXd>& covs, int per_state) {
  std::vector<IQRecord> out;
  std::normal_distribution<double> nd;
  for (std::size_t k = 0; k < means.size(); ++k) {
    const Eigen::MatrixXd l = covs[k].llt().matrixL();
    for (int s = 0; s < per_state; ++s) {
      Eigen::VectorXd z(means[k].size());
      for (auto& v : z) v = nd(rng);
      const Eigen::VectorXd x = means[k] + l * z;
      out.push_back({std::vector<double>(x.data(), x.data() + x.size()), static_cast<int>(k)});
    }
  }
  return out;
}

struct Problem {
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;
};

Problem random_problem(testgen::Rng& rng, int states, int dim, double spread) {
  Problem p;
  for (int k = 0; k < states; ++k) {
    Eigen::VectorXd mu(dim);
    for (auto& v : mu) v = testgen::uniform(rng, -10.0, 10.0);
    p.means.push_back(mu);
    p.covs.push_back(spread * spread * testgen::random_spd(rng, dim) / dim);
  }
  return p;
}

double gaussian_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mu, const Eigen::MatrixXd& cov) {
  const Eigen::VectorXd z = x - mu;
  const double q = z.dot(cov.inverse() * z);
  return -0.5 * q - 0.5 * std::log(cov.determinant()) - 0.5 * x.size() * std::log(2.0 * std::numbers::pi);
}

}  // namespace

TEST_SUITE("discriminate") {
  TEST_CASE("log-likelihoods equal the Gaussian density") {
    testgen::Rng rng(70);
    for (int trial = 0; trial < 10; ++trial) {
      const int dim = 2 * testgen::uniform_int(rng, 1, 4);
      const auto p = random_problem(rng, 3, dim, 1.0);
      const GaussianClassifier clf(p.means, p.covs, std::nullopt);
      Eigen::VectorXd x(dim);
      for (auto& v : x) v = testgen::uniform(rng, -5.0, 5.0);
      const auto l = clf.log_likelihoods(x);
      for (int k = 0; k < 3; ++k)
        CHECK(l[k] == doctest::Approx(gaussian_logpdf(x, p.means[k], p.covs[k]) + std::log(1.0 / 3.0)).epsilon(1e-9));
    }
  }

  TEST_CASE("training recovers cluster moments") {
    testgen::Rng rng(71);
    const auto p = random_problem(rng, 4, 4, 1.0);
    const auto data = clouds(rng, p.means, p.covs, 3000);
    const auto clf = train(data);
    REQUIRE(clf.states() == 4);
    for (int k = 0; k < 4; ++k) {
      CHECK((clf.means()[k] - p.means[k]).norm() < 0.1);
      CHECK((clf.covariances()[k] - p.covs[k]).cwiseAbs().maxCoeff() < 0.1);
    }
  }

  TEST_CASE("batch and single-record classification agree") {
    testgen::Rng rng(72);
    for (int trial = 0; trial < 5; ++trial) {
      const int dim = 2 * testgen::uniform_int(rng, 1, 5);
      const auto p = random_problem(rng, 5, dim, 4.0);
      const auto data = clouds(rng, p.means, p.covs, 60);
      TrainOptions opt;
      opt.shared_covariance = trial % 2 == 0;
      const auto clf = train(data, opt);
      const auto batch = classify_batch(clf, data);
      for (std::size_t i = 0; i < data.size(); ++i) CHECK(batch[i] == classify(clf, data[i]).label);
    }
  }

  TEST_CASE("exact ties go to the lower state") {
    const Eigen::VectorXd mu = Eigen::Vector2d(1.0, 1.0);
    const Eigen::MatrixXd cov = Eigen::Matrix2d::Identity();
    const GaussianClassifier clf({mu, mu}, {cov, cov}, std::nullopt);
    const IQRecord r{{0.3, 2.0}, std::nullopt};
    CHECK(classify(clf, r).label == 0);
    CHECK(classify_batch(clf, {r})[0] == 0);
  }

  TEST_CASE("assignment matrix is column-stochastic") {
    testgen::Rng rng(73);
    const auto p = random_problem(rng, 4, 2, 3.0);
    const auto data = clouds(rng, p.means, p.covs, 200);
    const auto clf = train(data);
    const auto am = assignment_matrix(clf, clouds(rng, p.means, p.covs, 200));
    for (int j = 0; j < 4; ++j) CHECK(am.p.col(j).sum() == doctest::Approx(1.0));
    CHECK(am.fidelity == doctest::Approx(am.p.trace() / 4.0));
  }

  TEST_CASE("assignment from explicit labels") {
    const auto am = assignment_from_labels({0, 0, 1, 1, 1, 1}, {0, 1, 1, 1, 1, 0}, 2);
    CHECK(am.p(0, 0) == doctest::Approx(0.5));
    CHECK(am.p(1, 0) == doctest::Approx(0.5));
    CHECK(am.p(1, 1) == doctest::Approx(0.75));
    CHECK(am.fidelity == doctest::Approx(0.625));
    CHECK_THROWS_AS(assignment_from_labels({0, 0}, {0, 0}, 2), Error);
  }

  TEST_CASE("mitigation inverts the assignment matrix onto the simplex") {
    testgen::Rng rng(74);
    for (int trial = 0; trial < 10; ++trial) {
      const int d = testgen::uniform_int(rng, 2, 6);
      AssignmentMatrix am;
      am.p = Eigen::MatrixXd::Identity(d, d) * 0.9;
      for (int j = 0; j < d; ++j) {
        Eigen::VectorXd leak(d);
        for (auto& v : leak) v = testgen::uniform(rng, 0.0, 1.0);
        leak[j] = 0.0;
        am.p.col(j) += 0.1 * leak / leak.sum();
      }
      Eigen::VectorXd truth(d);
      for (auto& v : truth) v = testgen::uniform(rng, 0.0, 1.0);
      truth /= truth.sum();
      const auto m = mitigate(am.p * truth, am);
      CHECK((m.populations - truth).cwiseAbs().maxCoeff() < 1e-6);
      CHECK(m.populations.minCoeff() >= 0.0);
      CHECK(m.populations.sum() == doctest::Approx(1.0));
    }
  }

  TEST_CASE("EM never lowers the mixture likelihood") {
    testgen::Rng rng(75);
    const auto p = random_problem(rng, 3, 2, 5.0);
    const auto data = clouds(rng, p.means, p.covs, 150);
    TrainOptions opt;
    opt.em_refine = true;
    opt.mixture_weights = true;
    const auto clf = train(data, opt);
    REQUIRE_FALSE(clf.em_history.empty());
    for (std::size_t k = 1; k < clf.em_history.size(); ++k) CHECK(clf.em_history[k] >= clf.em_history[k - 1]);
    REQUIRE(clf.weights());
    double total = 0.0;
    for (double w : *clf.weights()) total += w;
    CHECK(total == doctest::Approx(1.0));
  }

  TEST_CASE("coverage and input errors") {
    std::vector<IQRecord> data{{{0.0, 0.0}, 0}, {{1.0, 0.0}, 0}, {{0.0, 1.0}, 0}, {{5.0, 5.0}, 1}};
    try {
      train(data);
      FAIL("expected a coverage error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::coverage);
    }
    data.push_back({{5.0, 5.0}, std::nullopt});
    CHECK_THROWS_AS(train(data), Error);
    const Eigen::MatrixXd singular = Eigen::Matrix2d::Zero();
    try {
      GaussianClassifier({Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)}, {singular, singular}, std::nullopt);
      FAIL("expected a degeneracy error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::degeneracy);
    }
  }

  TEST_CASE("k-fold estimate on separated clusters") {
    testgen::Rng rng(76);
    const auto p = random_problem(rng, 3, 2, 0.5);
    const auto cv = kfold_fidelity(clouds(rng, p.means, p.covs, 60), 5, {}, 9);
    CHECK(cv.fold_fidelity.size() == 5);
    CHECK(cv.mean_fidelity > 0.97);
  }

  TEST_CASE("classifier JSON round trip") {
    testgen::Rng rng(77);
    const auto p = random_problem(rng, 3, 4, 1.0);
    const auto data = clouds(rng, p.means, p.covs, 50);
    TrainOptions opt;
    opt.mixture_weights = true;
    const auto clf = train(data, opt);
    const auto back = classifier_from_json(classifier_to_json(clf));
    CHECK(back.states() == 3);
    CHECK(back.shared_covariance() == clf.shared_covariance());
    for (const auto& r : data) {
      const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(r.values.data(), 4);
      CHECK((back.log_likelihoods(x) - clf.log_likelihoods(x)).cwiseAbs().maxCoeff() < 1e-12);
    }
    const auto path = (std::filesystem::temp_directory_path() / "tqd_clf.json").string();
    save_classifier(path, clf);
    CHECK(load_classifier(path).states() == 3);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(classifier_from_json(R"({"format":"other","version":1})"), Error);
  }
}
