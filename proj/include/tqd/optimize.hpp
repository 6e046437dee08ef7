#pragma once

#include <Eigen/Dense>

#include <functional>
#include <limits>

namespace tqd::optimize {

using Objective = std::function<double(const Eigen::VectorXd&)>;
using Residuals = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct NelderMeadOptions {
  int max_evaluations = 20000;
  double f_tolerance = 1e-14;  // spread of simplex values
  double x_tolerance = 1e-10;  // simplex diameter
  int restarts = 4;            // re-inflate the simplex around the best vertex
  double f_target = -std::numeric_limits<double>::infinity();
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
};

// Downhill simplex with dimension-adaptive coefficients.
MinimizeResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                           const NelderMeadOptions& options = {});

struct LeastSquaresOptions {
  int max_iterations = 300;
  double gradient_tolerance = 1e-14;
  double step_tolerance = 1e-13;
  double cost_tolerance = 1e-16;
  double fd_step = 1e-7;  // relative central-difference step
};

struct LeastSquaresResult {
  Eigen::VectorXd x;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd jacobian;
  double cost = 0.0;  // sum of squared residuals
  int iterations = 0;
  bool converged = false;

  // s^2 (J^T J)^-1 with s^2 = cost / (m - n).
  Eigen::MatrixXd covariance() const;
};

LeastSquaresResult levenberg_marquardt(const Residuals& r, const Eigen::VectorXd& x0,
                                       const LeastSquaresOptions& options = {});

Eigen::MatrixXd numeric_jacobian(const Residuals& r, const Eigen::VectorXd& x, const Eigen::VectorXd& r0,
                                 double rel_step);

// Bracketed scalar root; throws a fit error when f(lo) and f(hi) share a sign.
double find_root(const std::function<double(double)>& f, double lo, double hi, double x_tolerance,
                 int max_iterations = 200);

}  // namespace tqd::optimize
