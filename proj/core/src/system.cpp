#include "phdae/system.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <utility>

#include "phdae/linalg.hpp"

namespace phdae {

namespace {

void require_shape(const MatFun& f, Index rows, Index cols, const char* name) {
  if (f.rows() != rows || f.cols() != cols) {
    throw ShapeError(std::string("PHDAESystem: coefficient ") + name + " has shape " +
                     std::to_string(f.rows()) + "x" + std::to_string(f.cols()) +
                     ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace

PHDAESystem PHDAESystem::assemble(MatFun E, MatFun Q, MatFun J, MatFun R, MatFun K,
                                  MatFun B, MatFun P, MatFun S, MatFun N,
                                  double t0, double tf) {
  const Index n = E.rows();
  const Index m = B.cols();
  require_shape(E, n, n, "E");
  require_shape(Q, n, n, "Q");
  require_shape(J, n, n, "J");
  require_shape(R, n, n, "R");
  require_shape(K, n, n, "K");
  require_shape(B, n, m, "B");
  require_shape(P, n, m, "P");
  require_shape(S, m, m, "S");
  require_shape(N, m, m, "N");
  if (!(t0 < tf)) {
    throw ShapeError("PHDAESystem: interval requires t0 < tf");
  }
  PHDAESystem sys{n, m, t0, tf,
                  std::move(E), std::move(Q), std::move(J), std::move(R), std::move(K),
                  std::move(B), std::move(P), std::move(S), std::move(N)};
  return sys;
}

PHDAESystem PHDAESystem::pencil(MatFun E, MatFun J, MatFun R, double t0, double tf) {
  const Index n = E.rows();
  return assemble(std::move(E), MatFun::identity(n), std::move(J), std::move(R),
                  MatFun::zero(n, n), MatFun::zero(n, 0), MatFun::zero(n, 0),
                  MatFun::zero(0, 0), MatFun::zero(0, 0), t0, tf);
}

double PHDAESystem::hamiltonian(const Vector& x, double t) const {
  if (x.size() != n) {
    throw ShapeError("hamiltonian: state has dimension " + std::to_string(x.size()) +
                     ", expected " + std::to_string(n));
  }
  const Matrix qte = Q(t).transpose() * E(t);
  const Matrix sym = 0.5 * (qte + qte.transpose());
  return 0.5 * x.dot(sym * x);
}

Matrix PHDAESystem::w_matrix(double t) const {
  const Matrix q = Q(t);
  Matrix w(n + m, n + m);
  w.topLeftCorner(n, n) = q.transpose() * R(t) * q;
  w.topRightCorner(n, m) = q.transpose() * P(t);
  w.bottomLeftCorner(m, n) = P(t).transpose() * q;
  w.bottomRightCorner(m, m) = S(t);
  return w;
}

Matrix PHDAESystem::a_matrix(double t) const {
  return (J(t) - R(t)) * Q(t) - E(t) * K(t);
}

Matrix PHDAESystem::b_matrix(double t) const { return B(t) - P(t); }

Matrix PHDAESystem::c_matrix(double t) const {
  return (B(t) + P(t)).transpose() * Q(t);
}

Matrix PHDAESystem::d_matrix(double t) const { return S(t) + N(t); }

bool PHDAESystem::is_constant() const {
  return E.is_constant() && Q.is_constant() && J.is_constant() && R.is_constant() &&
         K.is_constant() && B.is_constant() && P.is_constant() && S.is_constant() &&
         N.is_constant();
}

std::vector<double> PHDAESystem::grid(Index points) const {
  if (points < 2) throw ShapeError("grid requires at least 2 points");
  std::vector<double> g(points);
  const double h = (tf - t0) / static_cast<double>(points - 1);
  for (Index i = 0; i < points; ++i) g[i] = t0 + h * static_cast<double>(i);
  g.back() = tf;
  return g;
}

StructureReport verify_structure(const PHDAESystem& sys, Index grid_points, double tol) {
  if (grid_points < 2) throw ShapeError("verify_structure: grid_points must be >= 2");

  // Residuals are polynomial identities, assembled exactly and sampled.
  const MatFun qte = sys.Q.transpose() * sys.E;
  const MatFun sym_gap = qte - sys.E.transpose() * sys.Q;
  const MatFun ekjq = sys.E * sys.K - sys.J * sys.Q;  // EK - JQ
  const MatFun identity_gap =
      qte.derivative() - sys.Q.transpose() * ekjq - ekjq.transpose() * sys.Q;

  StructureReport rep;
  rep.tol = tol;
  rep.grid_points = grid_points;
  rep.min_eig_QTE = std::numeric_limits<double>::infinity();
  rep.min_eig_W = std::numeric_limits<double>::infinity();
  if (sys.n + sys.m == 0) rep.min_eig_QTE = rep.min_eig_W = 0.0;

  double qte_norm = 0.0;
  double w_norm = 0.0;
  for (double t : sys.grid(grid_points)) {
    rep.skew_symmetry_residual =
        std::max(rep.skew_symmetry_residual, sym_gap(t).norm());
    rep.derivative_identity_residual =
        std::max(rep.derivative_identity_residual, identity_gap(t).norm());
    const Matrix qte_t = qte(t);
    rep.min_eig_QTE = std::min(rep.min_eig_QTE, min_eigenvalue_sym(qte_t));
    qte_norm = std::max(qte_norm, qte_t.norm());
    const Matrix w_t = sys.w_matrix(t);
    rep.min_eig_W = std::min(rep.min_eig_W, min_eigenvalue_sym(w_t));
    w_norm = std::max(w_norm, w_t.norm());
  }

  rep.symmetry_ok = rep.skew_symmetry_residual <= tol;
  rep.derivative_identity_ok = rep.derivative_identity_residual <= tol;
  rep.qte_psd_ok = rep.min_eig_QTE >= -tol * (1.0 + qte_norm);
  rep.w_psd_ok = rep.min_eig_W >= -tol * (1.0 + w_norm);
  rep.passed = rep.symmetry_ok && rep.derivative_identity_ok && rep.qte_psd_ok &&
               rep.w_psd_ok;
  return rep;
}

}  // namespace phdae
