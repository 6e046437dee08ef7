#include "tqd/tomography.hpp"

#include "tqd/error.hpp"
#include "tqd/units.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <sstream>

namespace tqd {

namespace {

using cplx = std::complex<double>;

std::string level_pair(int i) { return std::to_string(i) + std::to_string(i + 1); }

// Real parameters of a Hermitian matrix: d diagonals, then (Re, Im) of each
// upper element in row-major order.
Eigen::MatrixXcd basis_element(int d, int a) {
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(d, d);
  if (a < d) {
    b(a, a) = 1.0;
    return b;
  }
  int k = (a - d) / 2;
  const bool imag = (a - d) % 2 == 1;
  for (int r = 0; r < d; ++r)
    for (int c = r + 1; c < d; ++c) {
      if (k-- != 0) continue;
      b(r, c) = imag ? cplx(0.0, 1.0) : cplx(1.0, 0.0);
      b(c, r) = std::conj(b(r, c));
      return b;
    }
  return b;
}

std::string element_name(int d, int a) {
  if (a < d) return "rho_" + std::to_string(a) + std::to_string(a);
  int k = (a - d) / 2;
  const bool imag = (a - d) % 2 == 1;
  for (int r = 0; r < d; ++r)
    for (int c = r + 1; c < d; ++c)
      if (k-- == 0) return std::string(imag ? "Im" : "Re") + " rho_" + std::to_string(r) + "," + std::to_string(c);
  return "?";
}

}  // namespace

std::string GateSequence::mnemonic() const {
  if (ops.empty()) return "I";
  std::ostringstream os;
  for (std::size_t k = 0; k < ops.size(); ++k) {
    if (k) os << ";";
    const double deg = ops[k].angle * 180.0 / units::pi;
    os << (ops[k].axis == Axis::x ? "X" : "Y") << level_pair(ops[k].level) << ":" << std::round(deg * 1e6) / 1e6;
  }
  return os.str();
}

GateSequence GateSequence::parse(const std::string& text) {
  GateSequence g;
  if (text == "I" || text.empty()) return g;
  std::istringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ';')) {
    const auto colon = token.find(':');
    if (token.size() < 4 || (token[0] != 'X' && token[0] != 'Y') || colon == std::string::npos)
      fail(ErrorCategory::input, "bad gate mnemonic '" + token + "'");
    const std::string levels = token.substr(1, colon - 1);
    int level = -1;
    // Split the digit run into consecutive levels i, i+1.
    for (std::size_t cut = 1; cut < levels.size(); ++cut) {
      const std::string a = levels.substr(0, cut), b = levels.substr(cut);
      if (a.find_first_not_of("0123456789") != std::string::npos || b.find_first_not_of("0123456789") != std::string::npos)
        break;
      if ((a.size() > 1 && a[0] == '0') || (b.size() > 1 && b[0] == '0')) continue;
      if (std::stoi(b) == std::stoi(a) + 1) {
        level = std::stoi(a);
        break;
      }
    }
    if (level < 0) fail(ErrorCategory::input, "gate '" + token + "' does not name adjacent levels");
    double deg = 0.0;
    try {
      deg = std::stod(token.substr(colon + 1));
    } catch (const std::exception&) {
      fail(ErrorCategory::input, "bad angle in gate '" + token + "'");
    }
    g.ops.push_back({level, token[0] == 'X' ? Axis::x : Axis::y, deg * units::pi / 180.0});
  }
  return g;
}

Eigen::MatrixXcd subspace_unitary(int d, int i, Axis axis, double angle) {
  if (i < 0 || i + 1 >= d) fail(ErrorCategory::input, "rotation subspace outside the qudit dimension");
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(d, d);
  const double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
  u(i, i) = c;
  u(i + 1, i + 1) = c;
  if (axis == Axis::x) {
    u(i, i + 1) = cplx(0.0, -s);
    u(i + 1, i) = cplx(0.0, -s);
  } else {
    u(i, i + 1) = -s;
    u(i + 1, i) = s;
  }
  return u;
}

Eigen::MatrixXcd sequence_unitary(int d, const GateSequence& g) {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(d, d);
  for (const auto& op : g.ops) u = u * subspace_unitary(d, op.level, op.axis, op.angle);
  return u;
}

std::vector<GateSequence> tomography_gate_set(int d) {
  if (d < 2) fail(ErrorCategory::input, "tomography needs d >= 2");
  std::vector<GateSequence> out{GateSequence{}};
  for (int k = 1; k < d; ++k)
    for (int i = 0; i + k < d; ++i)
      for (Axis axis : {Axis::x, Axis::y}) {
        GateSequence g;
        g.ops.push_back({i, axis, units::pi / 2.0});
        for (int m = i + 1; m < i + k; ++m) g.ops.push_back({m, Axis::x, units::pi});
        out.push_back(std::move(g));
      }
  return out;
}

Eigen::MatrixXd ideal_probabilities(const DensityMatrix& rho, const std::vector<GateSequence>& gates) {
  const int d = static_cast<int>(rho.rows());
  Eigen::MatrixXd p(static_cast<Eigen::Index>(gates.size()), d);
  for (std::size_t g = 0; g < gates.size(); ++g) {
    const Eigen::MatrixXcd u = sequence_unitary(d, gates[g]);
    const Eigen::MatrixXcd out = u * rho * u.adjoint();
    for (int i = 0; i < d; ++i) p(static_cast<Eigen::Index>(g), i) = out(i, i).real();
  }
  return p;
}

DensityMatrix reconstruct_state(const Eigen::MatrixXd& probs, const std::vector<GateSequence>& gates) {
  const int d = static_cast<int>(probs.cols());
  if (d < 2) fail(ErrorCategory::input, "need at least two outcomes per sequence");
  if (probs.rows() != static_cast<Eigen::Index>(gates.size()))
    fail(ErrorCategory::input, "one probability row per gate sequence required");
  const int params = d * d;

  // p(g, i) = sum_a x_a Tr(P_{g,i} B_a) with P_{g,i} = U^dagger |i><i| U.
  Eigen::MatrixXd a(probs.rows() * d, params);
  Eigen::VectorXd b(probs.rows() * d);
  std::vector<Eigen::MatrixXcd> basis;
  for (int k = 0; k < params; ++k) basis.push_back(basis_element(d, k));
  for (Eigen::Index g = 0; g < probs.rows(); ++g) {
    const Eigen::MatrixXcd u = sequence_unitary(d, gates[g]);
    for (int i = 0; i < d; ++i) {
      const Eigen::Index row = g * d + i;
      const Eigen::VectorXcd ui = u.row(i).adjoint();  // U^dagger |i>
      for (int k = 0; k < params; ++k) a(row, k) = (ui.adjoint() * basis[k] * ui)(0, 0).real();
      b(row) = probs(g, i);
    }
  }

  // The trace constraint adds the row sum_i x_i = 1.
  Eigen::MatrixXd with_trace(a.rows() + 1, params);
  with_trace << a, Eigen::RowVectorXd::Zero(params);
  with_trace.bottomRows(1).leftCols(d).setOnes();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(with_trace);
  lu.setThreshold(1e-10);
  if (lu.rank() < params) {
    const Eigen::MatrixXd null = lu.kernel();
    std::ostringstream os;
    os << "tomography design has rank " << lu.rank() << " < " << params << "; unresolved:";
    for (int k = 0; k < params; ++k)
      if (null.row(k).norm() > 1e-8) os << " " << element_name(d, k);
    fail(ErrorCategory::degeneracy, os.str());
  }

  // Equality-constrained least squares via the KKT system.
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(params + 1, params + 1);
  kkt.topLeftCorner(params, params) = 2.0 * a.transpose() * a;
  kkt.block(params, 0, 1, d).setOnes();
  kkt.block(0, params, d, 1).setOnes();
  Eigen::VectorXd rhs(params + 1);
  rhs.head(params) = 2.0 * a.transpose() * b;
  rhs(params) = 1.0;
  const Eigen::VectorXd x = kkt.fullPivLu().solve(rhs);

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 0; k < params; ++k) rho += x(k) * basis[k];
  rho = 0.5 * (rho + rho.adjoint()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  // Subtract a common shift and clip so the spectrum lands on the simplex;
  // the result is the nearest density matrix in Frobenius norm.
  Eigen::VectorXd lambda = es.eigenvalues();
  std::vector<double> sorted(lambda.data(), lambda.data() + lambda.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double shift = 0.0, running = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    running += sorted[k];
    const double t = (running - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - t > 0.0) shift = t;
  }
  Eigen::VectorXd w = (lambda.array() - shift).cwiseMax(0.0);
  const double total = w.sum();
  if (!(total > 0.0)) fail(ErrorCategory::numerical, "reconstructed state has no positive weight");
  w /= total;
  DensityMatrix out = es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

double state_fidelity(const DensityMatrix& rho, const Eigen::VectorXcd& psi) {
  if (rho.rows() != psi.size() || rho.cols() != psi.size()) fail(ErrorCategory::input, "dimension mismatch");
  const double norm = psi.squaredNorm();
  if (!(norm > 0.0)) fail(ErrorCategory::input, "state vector is zero");
  return (psi.adjoint() * rho * psi)(0, 0).real() / norm;
}

}  // namespace tqd
