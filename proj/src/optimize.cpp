#include "tqd/optimize.hpp"

#include "tqd/error.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace tqd::optimize {

namespace {

struct Simplex {
  std::vector<Eigen::VectorXd> x;
  std::vector<double> f;
};

void order(Simplex& s) {
  std::vector<std::size_t> idx(s.x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s.f[a] < s.f[b]; });
  Simplex sorted;
  for (auto i : idx) {
    sorted.x.push_back(s.x[i]);
    sorted.f.push_back(s.f[i]);
  }
  s = std::move(sorted);
}

}  // namespace

MinimizeResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                           const NelderMeadOptions& options) {
  const int n = static_cast<int>(x0.size());
  if (step.size() != n) fail(ErrorCategory::input, "simplex step size does not match dimension");
  const double nd = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / nd;
  const double gamma = 0.75 - 0.5 / nd;
  const double delta = 1.0 - 1.0 / nd;

  MinimizeResult out;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++out.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  Eigen::VectorXd best = x0;
  double best_f = eval(x0);
  Eigen::VectorXd scale = step;

  for (int round = 0; round <= options.restarts; ++round) {
    Simplex s;
    s.x.push_back(best);
    s.f.push_back(best_f);
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd v = best;
      v(k) += scale(k);
      s.x.push_back(v);
      s.f.push_back(eval(v));
    }
    bool converged = false;
    while (out.evaluations < options.max_evaluations) {
      order(s);
      ++out.iterations;
      double diameter = 0.0;
      for (int k = 1; k <= n; ++k) diameter = std::max(diameter, (s.x[k] - s.x[0]).lpNorm<Eigen::Infinity>());
      if ((s.f[n] - s.f[0] <= options.f_tolerance && diameter <= options.x_tolerance * (1.0 + s.x[0].norm())) ||
          s.f[0] <= options.f_target) {
        converged = true;
        break;
      }
      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
      for (int k = 0; k < n; ++k) centroid += s.x[k];
      centroid /= nd;

      const Eigen::VectorXd xr = centroid + alpha * (centroid - s.x[n]);
      const double fr = eval(xr);
      if (fr < s.f[0]) {
        const Eigen::VectorXd xe = centroid + beta * (xr - centroid);
        const double fe = eval(xe);
        if (fe < fr) {
          s.x[n] = xe;
          s.f[n] = fe;
        } else {
          s.x[n] = xr;
          s.f[n] = fr;
        }
        continue;
      }
      if (fr < s.f[n - 1]) {
        s.x[n] = xr;
        s.f[n] = fr;
        continue;
      }
      const bool outside = fr < s.f[n];
      const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + gamma * (xr - centroid))
                                         : Eigen::VectorXd(centroid - gamma * (centroid - s.x[n]));
      const double fc = eval(xc);
      if (fc < (outside ? fr : s.f[n])) {
        s.x[n] = xc;
        s.f[n] = fc;
        continue;
      }
      for (int k = 1; k <= n; ++k) {
        s.x[k] = s.x[0] + delta * (s.x[k] - s.x[0]);
        s.f[k] = eval(s.x[k]);
      }
    }
    order(s);
    const double improvement = best_f - s.f[0];
    best = s.x[0];
    best_f = s.f[0];
    out.converged = converged;
    if (!converged || best_f <= options.f_target) break;
    if (round > 0 && improvement <= options.f_tolerance) break;
    // Smaller re-inflation each round; the first restart uses the original step.
    scale *= 0.5;
  }
  out.x = best;
  out.value = best_f;
  return out;
}

Eigen::MatrixXd numeric_jacobian(const Residuals& r, const Eigen::VectorXd& x, const Eigen::VectorXd& r0,
                                 double rel_step) {
  Eigen::MatrixXd j(r0.size(), x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double h = rel_step * std::max(1.0, std::abs(x(k)));
    Eigen::VectorXd xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    j.col(k) = (r(xp) - r(xm)) / (2.0 * h);
  }
  return j;
}

Eigen::MatrixXd LeastSquaresResult::covariance() const {
  const Eigen::Index m = residuals.size();
  const Eigen::Index n = x.size();
  const double s2 = m > n ? cost / static_cast<double>(m - n) : 0.0;
  const Eigen::MatrixXd jtj = jacobian.transpose() * jacobian;
  return s2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
}

LeastSquaresResult levenberg_marquardt(const Residuals& r, const Eigen::VectorXd& x0,
                                       const LeastSquaresOptions& options) {
  LeastSquaresResult out;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd res = r(x);
  if (!res.allFinite()) fail(ErrorCategory::fit, "residuals are not finite at the starting point");
  double cost = res.squaredNorm();
  Eigen::MatrixXd jac = numeric_jacobian(r, x, res, options.fd_step);

  Eigen::MatrixXd jtj = jac.transpose() * jac;
  double mu = 1e-3 * std::max(jtj.diagonal().maxCoeff(), 1e-300);
  double nu = 2.0;

  for (int it = 0; it < options.max_iterations; ++it) {
    out.iterations = it + 1;
    const Eigen::VectorXd grad = jac.transpose() * res;
    if (grad.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance || cost == 0.0) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd d = jtj.diagonal().cwiseMax(1e-12 * std::max(jtj.diagonal().maxCoeff(), 1e-300));
    Eigen::MatrixXd a = jtj;
    a.diagonal() += mu * d;
    const Eigen::VectorXd h = a.ldlt().solve(-grad);
    if (!h.allFinite()) {
      mu *= nu;
      nu *= 2.0;
      continue;
    }
    if (h.norm() <= options.step_tolerance * (x.norm() + options.step_tolerance)) {
      out.converged = true;
      break;
    }
    const Eigen::VectorXd x_new = x + h;
    const Eigen::VectorXd res_new = r(x_new);
    const double cost_new = res_new.allFinite() ? res_new.squaredNorm() : std::numeric_limits<double>::infinity();
    const double predicted = h.dot(mu * d.cwiseProduct(h) - grad);
    const double rho = predicted > 0.0 ? (cost - cost_new) / predicted : -1.0;
    if (rho > 0.0) {
      const double drop = cost - cost_new;
      x = x_new;
      res = res_new;
      cost = cost_new;
      jac = numeric_jacobian(r, x, res, options.fd_step);
      jtj = jac.transpose() * jac;
      mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
      if (drop <= options.cost_tolerance * std::max(cost, 1e-300) || cost <= options.cost_tolerance) {
        out.converged = true;
        break;
      }
    } else {
      mu *= nu;
      nu *= 2.0;
      if (mu > 1e30) break;
    }
  }
  out.x = x;
  out.residuals = res;
  out.jacobian = jac;
  out.cost = cost;
  return out;
}

double find_root(const std::function<double(double)>& f, double lo, double hi, double x_tolerance,
                 int max_iterations) {
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi)) {
    std::ostringstream os;
    os << "no sign change on [" << lo << ", " << hi << "] (f = " << flo << ", " << fhi << ")";
    fail(ErrorCategory::fit, os.str());
  }
  boost::uintmax_t iters = static_cast<boost::uintmax_t>(max_iterations);
  auto tol = [x_tolerance](double a, double b) { return std::abs(a - b) <= x_tolerance; };
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (a + b);
}

}  // namespace tqd::optimize
