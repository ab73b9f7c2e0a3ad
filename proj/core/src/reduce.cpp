#include "phdae/reduce.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <utility>

#include "phdae/linalg.hpp"
#include "phdae/polyfit.hpp"

namespace phdae {

namespace {

struct SignFixedSvd {
  Matrix U;  // full, n x n
  Matrix V;
  Vector sigma;
  Index rank = 0;
};

// Full SVD with a reproducible sign convention: every right singular vector
// gets a nonnegative leading entry (paired U column flipped along for the
// range part).
SignFixedSvd sign_fixed_svd(const Matrix& a, double tol = kRankTol) {
  SignFixedSvd out;
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.U = svd.matrixU();
  out.V = svd.matrixV();
  out.sigma = svd.singularValues();
  const double smax = out.sigma.size() ? out.sigma(0) : 0.0;
  for (Index i = 0; i < out.sigma.size(); ++i) {
    if (out.sigma(i) > tol * smax * std::max(a.rows(), a.cols())) ++out.rank;
  }
  for (Index j = 0; j < out.V.cols(); ++j) {
    Index lead = 0;
    while (lead + 1 < out.V.rows() && out.V(lead, j) == 0.0) ++lead;
    if (out.V(lead, j) < 0.0) {
      out.V.col(j) *= -1.0;
      if (j < out.rank && j < out.U.cols()) out.U.col(j) *= -1.0;
    }
  }
  for (Index j = out.rank; j < out.U.cols(); ++j) {
    Index lead = 0;
    while (lead + 1 < out.U.rows() && out.U(lead, j) == 0.0) ++lead;
    if (out.U(lead, j) < 0.0) out.U.col(j) *= -1.0;
  }
  return out;
}

void require_well_conditioned(const Matrix& a, double tol, const char* name) {
  const double smin = smallest_singular_value(a);
  if (smin <= tol * std::max(1.0, a.norm())) {
    throw NumericalError(std::string("index_one_canonical: block ") + name +
                         " is numerically singular (sigma_min=" +
                         std::to_string(smin) + ")");
  }
}

// The two-shear transform pair (U, V) of the index-one canonical form,
// built from the coefficients frozen at time t.
std::pair<Matrix, Matrix> canonical_transforms_at(const PHDAESystem& sys, double t,
                                                  Index n1, double tol) {
  const Index n = sys.n;
  const Index n2 = n - n1;
  const SignFixedSvd esvd = sign_fixed_svd(sys.E(t));
  if (esvd.rank != n1) {
    throw NumericalError("index_one_canonical: rank of E drifted across the grid");
  }
  const Matrix& ut = esvd.U;
  const Matrix& vt = esvd.V;
  if (n2 == 0) return {ut, vt};

  const Matrix e11 = ut.leftCols(n1).transpose() * sys.E(t) * vt.leftCols(n1);
  const Matrix l = ut.transpose() * (sys.J(t) - sys.R(t)) * ut;
  const Matrix l12 = l.topRightCorner(n1, n2);
  const Matrix l22 = l.bottomRightCorner(n2, n2);
  const Matrix qp = ut.transpose() * sys.Q(t) * vt;
  const Matrix q11 = qp.topLeftCorner(n1, n1);
  const Matrix q21 = qp.bottomLeftCorner(n2, n1);
  const Matrix q22 = qp.bottomRightCorner(n2, n2);
  const Matrix kt = vt.transpose() * sys.K(t) * vt;  // constant-V congruence of K
  const Matrix k12 = kt.topRightCorner(n1, n2);

  require_well_conditioned(l22, tol, "L22");
  require_well_conditioned(q22, tol, "Q22");

  // T21 = -L22^{-T} (L12 - E11 K12 Q22^{-1})^T, via solves.
  const Matrix k12_q22inv =
      q22.transpose().partialPivLu().solve(k12.transpose()).transpose();
  const Matrix g = l12 - e11 * k12_q22inv;
  const Matrix t21 = -l22.transpose().partialPivLu().solve(g.transpose());

  Matrix tshear = Matrix::Identity(n, n);
  tshear.bottomLeftCorner(n2, n1) = t21;
  const Matrix u_full = ut * tshear;

  // Q after the U-shear: T^{-1} (U~^T Q V~) has (2,1) block Q21 - T21 Q11.
  const Matrix q21_sheared = q21 - t21 * q11;
  Matrix tq = Matrix::Identity(n, n);
  tq.bottomLeftCorner(n2, n1) = -q22.partialPivLu().solve(q21_sheared);
  const Matrix v_full = vt * tq;
  return {u_full, v_full};
}

}  // namespace

MatFun CanonicalIndexOne::E11() const { return block(system.E, 0, 0, n1, n1); }
MatFun CanonicalIndexOne::Q11() const { return block(system.Q, 0, 0, n1, n1); }
MatFun CanonicalIndexOne::Q22() const { return block(system.Q, n1, n1, n2, n2); }
MatFun CanonicalIndexOne::L11() const {
  return block(system.J - system.R, 0, 0, n1, n1);
}
MatFun CanonicalIndexOne::L12() const {
  return block(system.J - system.R, 0, n1, n1, n2);
}
MatFun CanonicalIndexOne::L21() const {
  return block(system.J - system.R, n1, 0, n2, n1);
}
MatFun CanonicalIndexOne::L22() const {
  return block(system.J - system.R, n1, n1, n2, n2);
}
MatFun CanonicalIndexOne::J11() const { return block(system.J, 0, 0, n1, n1); }
MatFun CanonicalIndexOne::R11() const { return block(system.R, 0, 0, n1, n1); }
MatFun CanonicalIndexOne::R12() const { return block(system.R, 0, n1, n1, n2); }
MatFun CanonicalIndexOne::J21() const { return block(system.J, n1, 0, n2, n1); }
MatFun CanonicalIndexOne::K11() const { return block(system.K, 0, 0, n1, n1); }
MatFun CanonicalIndexOne::K12() const { return block(system.K, 0, n1, n1, n2); }
MatFun CanonicalIndexOne::B1() const { return block(system.B, 0, 0, n1, system.m); }
MatFun CanonicalIndexOne::B2() const { return block(system.B, n1, 0, n2, system.m); }
MatFun CanonicalIndexOne::P1() const { return block(system.P, 0, 0, n1, system.m); }
MatFun CanonicalIndexOne::P2() const { return block(system.P, n1, 0, n2, system.m); }

CanonicalIndexOne index_one_canonical(const PHDAESystem& sys, double tol) {
  if (!check_index_le_one(sys, tol)) {
    throw NumericalError(
        "index_one_canonical: system is not of differentiation-index <= 1 "
        "(L22 Q22 block is singular); regularize it first");
  }
  const Index n = sys.n;
  const Index n1 = numerical_rank(sys.E(sys.t0));

  CanonicalIndexOne out;
  out.n1 = n1;
  out.n2 = n - n1;

  TransformPair tp{MatFun::identity(n), MatFun::identity(n)};
  CongruenceOptions opts;
  opts.singular_tol = 1e-13;
  if (sys.is_constant()) {
    const auto [u_full, v_full] = canonical_transforms_at(sys, sys.t0, n1, tol);
    tp.U = MatFun::constant(u_full);
    tp.V = MatFun::constant(v_full);
  } else {
    const auto ufun = [&](double t) {
      return canonical_transforms_at(sys, t, n1, tol).first;
    };
    const auto vfun = [&](double t) {
      return canonical_transforms_at(sys, t, n1, tol).second;
    };
    double ru = 0.0, rv = 0.0;
    tp.U = fit_matfun(ufun, n, n, sys.t0, sys.tf, opts.max_refit_degree, &ru);
    tp.V = fit_matfun(vfun, n, n, sys.t0, sys.tf, opts.max_refit_degree, &rv);
    out.refit_residual = std::max(ru, rv);
  }

  CongruenceResult cong = congruence(sys, tp, opts);
  out.system = std::move(cong.system);
  out.U = tp.U;
  out.V = tp.V;
  out.refit_residual = std::max(out.refit_residual, cong.refit_residual);

  // Structural residuals of the canonical form.
  const MatFun zero_block = out.L12() * out.Q22() - out.E11() * out.K12();
  const MatFun q12 = block(out.system.Q, 0, out.n1, out.n1, out.n2);
  const MatFun q21 = block(out.system.Q, out.n1, 0, out.n2, out.n1);
  for (double t : sys.grid(33)) {
    out.structural_zero_residual =
        std::max(out.structural_zero_residual, zero_block(t).norm());
    out.q_offdiag_residual =
        std::max(out.q_offdiag_residual, std::max(q12(t).norm(), q21(t).norm()));
  }
  const double scale = 1.0 + sys.E.coefficient_scale() + sys.Q.coefficient_scale() +
                       sys.J.coefficient_scale() + sys.R.coefficient_scale() +
                       sys.K.coefficient_scale();
  if (out.structural_zero_residual > tol * scale || out.q_offdiag_residual > tol * scale) {
    std::ostringstream msg;
    msg << "index_one_canonical: canonical-form residuals exceed tolerance "
        << "(structural zero " << out.structural_zero_residual << ", Q off-diagonal "
        << out.q_offdiag_residual << "); input is inconsistent with the pHDAE "
        << "structure or too far from constant rank";
    throw NumericalError(msg.str());
  }
  return out;
}

ReducedSystem reduce_index_one(const CanonicalIndexOne& canonical) {
  const Index n1 = canonical.n1;
  const Index n2 = canonical.n2;
  const Index m = canonical.system.m;
  const PHDAESystem& csys = canonical.system;

  ReducedSystem red;
  red.n1 = n1;
  red.n2 = n2;
  red.U = canonical.U;
  red.V = canonical.V;
  red.L22Q22 = canonical.L22() * canonical.Q22();
  red.L21Q11 = canonical.L21() * canonical.Q11();
  red.B2mP2 = canonical.B2() - canonical.P2();

  MatFun bhat = canonical.B1();
  MatFun phat = canonical.P1();
  MatFun shat = csys.S;
  MatFun nhat = csys.N;
  MatFun x2_x1 = MatFun::zero(n2, n1);
  MatFun x2_u = MatFun::zero(n2, m);

  const bool constant = csys.is_constant();
  const auto at = [&](const MatFun& f) { return f(csys.t0); };

  if (n2 > 0) {
    const auto hat_parts = [&](double t) {
      const Matrix l22 = canonical.L22()(t);
      const Matrix j21t = canonical.J21()(t).transpose();
      const Matrix r12 = canonical.R12()(t);
      const Matrix b2 = canonical.B2()(t);
      const Matrix p2 = canonical.P2()(t);
      const Eigen::PartialPivLU<Matrix> lu(l22);
      const Eigen::PartialPivLU<Matrix> lut(l22.transpose());
      const Matrix y1 = lut.solve(b2 + p2);        // L22^{-T}(B2+P2)
      const Matrix y2 = lu.solve(b2 - p2);         // L22^{-1}(B2-P2)
      const Matrix corr = 0.5 * (j21t - r12) * y1;
      const Matrix term = (b2 + p2).transpose() * y2;
      return std::make_tuple(corr, term, y2);
    };

    if (constant) {
      const auto [corr, term, y2] = hat_parts(csys.t0);
      bhat = MatFun::constant(at(canonical.B1()) - corr);
      phat = MatFun::constant(at(canonical.P1()) - corr);
      shat = MatFun::constant(at(csys.S) - 0.5 * (term + term.transpose()));
      nhat = MatFun::constant(at(csys.N) - 0.5 * (term - term.transpose()));
      const Matrix lq = at(red.L22Q22);
      const Eigen::PartialPivLU<Matrix> lu_lq(lq);
      x2_x1 = MatFun::constant(-lu_lq.solve(at(red.L21Q11)));
      x2_u = MatFun::constant(-lu_lq.solve(at(red.B2mP2)));
    } else {
      const int deg = 12;
      double rres = 0.0;
      bhat = fit_matfun([&](double t) {
        return Matrix(canonical.B1()(t) - std::get<0>(hat_parts(t)));
      }, n1, m, csys.t0, csys.tf, deg, &rres);
      phat = fit_matfun([&](double t) {
        return Matrix(canonical.P1()(t) - std::get<0>(hat_parts(t)));
      }, n1, m, csys.t0, csys.tf, deg);
      shat = fit_matfun([&](double t) {
        const Matrix term = std::get<1>(hat_parts(t));
        return Matrix(csys.S(t) - 0.5 * (term + term.transpose()));
      }, m, m, csys.t0, csys.tf, deg);
      nhat = fit_matfun([&](double t) {
        const Matrix term = std::get<1>(hat_parts(t));
        return Matrix(csys.N(t) - 0.5 * (term - term.transpose()));
      }, m, m, csys.t0, csys.tf, deg);
      x2_x1 = fit_matfun([&](double t) {
        return Matrix(-red.L22Q22(t).partialPivLu().solve(red.L21Q11(t)));
      }, n2, n1, csys.t0, csys.tf, deg);
      x2_u = fit_matfun([&](double t) {
        return Matrix(-red.L22Q22(t).partialPivLu().solve(red.B2mP2(t)));
      }, n2, m, csys.t0, csys.tf, deg);
    }
  }

  red.ode = PHDAESystem::assemble(canonical.E11(), canonical.Q11(), canonical.J11(),
                                  canonical.R11(), canonical.K11(), bhat, phat, shat,
                                  nhat, csys.t0, csys.tf);
  red.x2_from_x1 = x2_x1;
  red.x2_from_u = x2_u;
  return red;
}

double ReducedSystem::constraint_residual(const Vector& x1, const Vector& x2,
                                          const Vector& u, double t) const {
  if (n2 == 0) return 0.0;
  Vector r = L22Q22(t) * x2 + L21Q11(t) * x1;
  if (u.size() > 0) r += B2mP2(t) * u;
  return r.norm();
}

double ReducedSystem::consistency_residual(const Vector& x_original, const Vector& u0,
                                           double t0) const {
  const Vector xt = V(t0).partialPivLu().solve(x_original);
  return constraint_residual(xt.head(n1), xt.tail(n2), u0, t0);
}

Vector ReducedSystem::lift(const Vector& x1, const Vector& u, double t) const {
  Vector xt(n1 + n2);
  xt.head(n1) = x1;
  if (n2 > 0) {
    Vector x2 = x2_from_x1(t) * x1;
    if (u.size() > 0) x2 += x2_from_u(t) * u;
    xt.tail(n2) = x2;
  }
  return V(t) * xt;
}

Vector ReducedSystem::split_x1(const Vector& x_original, double t) const {
  const Vector xt = V(t).partialPivLu().solve(x_original);
  return xt.head(n1);
}

RegularizedSystem regularize_high_index(const PHDAESystem& sys, const IndexData& idx,
                                        double tol) {
  RegularizedSystem out;
  out.U1 = Matrix::Identity(sys.n, sys.n);
  out.U2 = Matrix::Identity(sys.n, sys.n);
  out.V = Matrix::Identity(sys.n, sys.n);

  const Index a3 = idx.A3.rows();
  if (a3 == 0) {
    out.identity = true;
    out.overdetermined = sys;
    out.subsystem = sys;
    return out;
  }
  if (!sys.is_constant()) {
    throw ShapeError("regularize_high_index: constant coefficients required");
  }
  if (idx.A3.cols() != sys.n) {
    throw ShapeError("regularize_high_index: A3 column count does not match n");
  }

  const Index n = sys.n;
  const SignFixedSvd esvd = sign_fixed_svd(sys.E(sys.t0));
  const Index r = esvd.rank;
  const Index nk = n - r;  // kernel block size

  const Matrix a3v = idx.A3 * esvd.V;
  const Matrix a31 = a3v.leftCols(r);
  const Matrix a32 = a3v.rightCols(nk);
  if (numerical_rank(a32) != a3) {
    Eigen::JacobiSVD<Matrix> svd(a32);
    std::ostringstream msg;
    msg << "regularize_high_index: hidden-constraint block A32 is not of full row "
        << "rank; singular values:";
    for (Index i = 0; i < svd.singularValues().size(); ++i) {
      msg << " " << svd.singularValues()(i);
    }
    msg << ". The hidden constraints do not pin kernel directions of E.";
    throw NumericalError(msg.str());
  }

  // Orthogonal V2 with A32 V2 = [0, A33], A33 invertible.
  Eigen::JacobiSVD<Matrix> asvd(a32, Eigen::ComputeFullV);
  Matrix v2(nk, nk);
  v2.leftCols(nk - a3) = asvd.matrixV().rightCols(nk - a3);
  v2.rightCols(a3) = asvd.matrixV().leftCols(a3);
  out.A33 = a32 * v2.rightCols(a3);

  Matrix shear = Matrix::Identity(n, n);
  shear.bottomLeftCorner(a3, r) = -out.A33.partialPivLu().solve(a31);

  Matrix v_total = Matrix::Zero(n, n);
  v_total.leftCols(r) = esvd.V.leftCols(r);
  v_total.rightCols(nk) = esvd.V.rightCols(nk) * v2;
  v_total = (v_total * shear).eval();
  out.U1 = esvd.U;
  out.V = v_total;

  const Matrix pinned_check = idx.A3 * v_total;
  if (pinned_check.leftCols(n - a3).norm() >
      tol * (1.0 + idx.A3.norm()) * (1.0 + v_total.norm())) {
    throw NumericalError("regularize_high_index: variable change failed to isolate "
                         "the pinned coordinates");
  }

  const CongruenceResult step1 = congruence(
      sys, {MatFun::constant(out.U1), MatFun::constant(v_total)});

  // Row compression of the leading Q columns; the trailing zero rows make the
  // leading square subsystem inherit the pHDAE structure.
  const Matrix q1 = step1.system.Q(sys.t0);
  const Matrix g = q1.leftCols(n - a3);
  const Index rho = numerical_rank(g);
  if (rho != n - a3) {
    std::ostringstream msg;
    msg << "regularize_high_index: leading Q block has rank " << rho << " < "
        << (n - a3) << "; the constant-rank assumption on Q is violated";
    throw NumericalError(msg.str());
  }
  Eigen::JacobiSVD<Matrix> gsvd(g, Eigen::ComputeFullU);
  out.U2 = gsvd.matrixU();

  const CongruenceResult step2 = congruence(
      step1.system, {MatFun::constant(out.U2), MatFun::identity(n)});
  out.overdetermined = step2.system;
  out.pinned = a3;

  const Index k = n - a3;
  const PHDAESystem& full = out.overdetermined;
  if (full.Q(sys.t0).bottomLeftCorner(a3, k).norm() > tol * (1.0 + q1.norm())) {
    throw NumericalError("regularize_high_index: Q row compression left nonzero "
                         "rows in the pinned block");
  }
  out.subsystem = PHDAESystem::assemble(
      block(full.E, 0, 0, k, k), block(full.Q, 0, 0, k, k), block(full.J, 0, 0, k, k),
      block(full.R, 0, 0, k, k), block(full.K, 0, 0, k, k),
      block(full.B, 0, 0, k, full.m), block(full.P, 0, 0, k, full.m), full.S, full.N,
      sys.t0, sys.tf);
  return out;
}

namespace {

void require_zero_block(const Matrix& m, double scale, double tol, const char* what) {
  if (m.size() > 0 && m.norm() > tol * (1.0 + scale)) {
    throw ShapeError(std::string("gas_reduction: expected zero block ") + what +
                     " has norm " + std::to_string(m.norm()));
  }
}

}  // namespace

GasSplit gas_reduction(const PHDAESystem& sys, Index n1, Index n2, Index n3,
                       double tol) {
  if (n1 + n2 + n3 != sys.n || n1 < 0 || n2 < 1 || n3 < 1) {
    throw ShapeError("gas_reduction: block sizes do not partition the state");
  }
  if (n3 > n2) {
    throw ShapeError("gas_reduction: requires n3 <= n2 for N~ to have full row rank");
  }
  if (!sys.is_constant()) {
    throw ShapeError("gas_reduction: constant coefficients required");
  }

  const double t = sys.t0;
  const Matrix e = sys.E(t);
  const Matrix j = sys.J(t);
  const Matrix rr = sys.R(t);
  const Matrix b = sys.B(t);
  const double scale = e.norm() + j.norm() + rr.norm() + b.norm();

  // Structural zeros of the gas-network form.
  require_zero_block(sys.Q(t) - Matrix::Identity(sys.n, sys.n), 1.0, tol, "Q - I");
  require_zero_block(sys.P(t), scale, tol, "P");
  require_zero_block(sys.S(t) + sys.N(t), scale, tol, "S + N");
  require_zero_block(sys.K(t), scale, tol, "K");
  require_zero_block(e.block(0, n1, n1, n2 + n3), scale, tol, "E12/E13");
  require_zero_block(e.block(n1, 0, n2, n1), scale, tol, "E21");
  require_zero_block(e.block(n1, n1 + n2, n2, n3), scale, tol, "E23");
  require_zero_block(e.bottomRows(n3), scale, tol, "E3*");
  require_zero_block(e.rightCols(n3).topRows(n1 + n2), scale, tol, "E*3");
  require_zero_block(j.block(0, 0, n1, n1), scale, tol, "J11");
  require_zero_block(j.block(0, n1 + n2, n1, n3), scale, tol, "J13");
  require_zero_block(j.block(n1, n1, n2, n2), scale, tol, "J22");
  require_zero_block(j.block(n1 + n2, 0, n3, n1), scale, tol, "J31");
  require_zero_block(j.block(n1 + n2, n1 + n2, n3, n3), scale, tol, "J33");
  require_zero_block(rr.topRows(n1), scale, tol, "R1*");
  require_zero_block(rr.bottomRows(n3), scale, tol, "R3*");
  require_zero_block(rr.block(n1, 0, n2, n1), scale, tol, "R21");
  require_zero_block(rr.block(n1, n1 + n2, n2, n3), scale, tol, "R23");
  require_zero_block(b.topRows(n1), scale, tol, "B1");
  require_zero_block(b.bottomRows(n3), scale, tol, "B3");

  GasSplit out;
  out.n1 = n1;
  out.n2 = n2;
  out.n3 = n3;
  out.M1 = e.topLeftCorner(n1, n1);
  const Matrix m2 = e.block(n1, n1, n2, n2);
  const Matrix gt = -j.block(0, n1, n1, n2);       // G~
  const Matrix nt = -j.block(n1 + n2, n1, n3, n2); // N~
  const Matrix dt = rr.block(n1, n1, n2, n2);      // D~
  const Matrix b2 = b.middleRows(n1, n2);          // B~2

  // Permuted SVD of N~^T: U_N N~^T = [0; Sigma] V_N.
  Eigen::JacobiSVD<Matrix> nsvd(nt.transpose(),
                                Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smin = nsvd.singularValues().minCoeff();
  if (smin <= kRankTol * std::max(1.0, nsvd.singularValues().maxCoeff()) * n2) {
    throw NumericalError("gas_reduction: N~ is not of full row rank (Sigma singular)");
  }
  out.UN = Matrix::Zero(n2, n2);
  out.UN.topRows(n2 - n3) = nsvd.matrixU().rightCols(n2 - n3).transpose();
  out.UN.bottomRows(n3) = nsvd.matrixU().leftCols(n3).transpose();
  out.Sigma = Matrix(nsvd.singularValues().asDiagonal());
  out.VN = nsvd.matrixV().transpose();

  const Matrix msplit = out.UN * m2 * out.UN.transpose();
  const Matrix dsplit = out.UN * dt * out.UN.transpose();
  out.M22 = msplit.topLeftCorner(n2 - n3, n2 - n3);
  out.M23 = msplit.topRightCorner(n2 - n3, n3);
  out.M33 = msplit.bottomRightCorner(n3, n3);
  out.D22 = dsplit.topLeftCorner(n2 - n3, n2 - n3);
  out.D23 = dsplit.topRightCorner(n2 - n3, n3);
  out.D33 = dsplit.bottomRightCorner(n3, n3);
  const Matrix gsplit = gt * out.UN.transpose();
  out.G12 = gsplit.leftCols(n2 - n3);
  out.G13 = gsplit.rightCols(n3);
  const Matrix bsplit = out.UN * b2;
  out.B22 = bsplit.topRows(n2 - n3);
  out.B32 = bsplit.bottomRows(n3);

  const Index nr = n1 + (n2 - n3);
  Matrix er = Matrix::Zero(nr, nr);
  er.topLeftCorner(n1, n1) = out.M1;
  er.bottomRightCorner(n2 - n3, n2 - n3) = out.M22;
  Matrix jr = Matrix::Zero(nr, nr);
  jr.topRightCorner(n1, n2 - n3) = -out.G12;
  jr.bottomLeftCorner(n2 - n3, n1) = out.G12.transpose();
  Matrix rrr = Matrix::Zero(nr, nr);
  rrr.bottomRightCorner(n2 - n3, n2 - n3) = out.D22;
  Matrix br = Matrix::Zero(nr, sys.m);
  br.bottomRows(n2 - n3) = out.B22;

  out.reduced_ode = PHDAESystem::assemble(
      MatFun::constant(er), MatFun::identity(nr), MatFun::constant(jr),
      MatFun::constant(rrr), MatFun::zero(nr, nr), MatFun::constant(br),
      MatFun::zero(nr, sys.m), sys.S, sys.N, sys.t0, sys.tf);
  return out;
}

Vector GasSplit::multiplier(const Vector& x1, const Vector& x22, const Vector& dx22,
                            const Vector& u) const {
  Vector rhs = M23.transpose() * dx22 - G13.transpose() * x1 + D23.transpose() * x22;
  if (u.size() > 0) rhs -= B32 * u;
  return Sigma.diagonal().cwiseInverse().asDiagonal() * rhs;
}

Vector GasSplit::dx22_from_state(const Vector& x1, const Vector& x22,
                                 const Vector& u) const {
  Vector rhs = G12.transpose() * x1 - D22 * x22;
  if (u.size() > 0) rhs += B22 * u;
  return M22.ldlt().solve(rhs);
}

std::pair<double, double> GasSplit::consistency_residuals(const Vector& x_original,
                                                          const Vector& u0) const {
  if (x_original.size() != n1 + n2 + n3) {
    throw ShapeError("gas_reduction consistency: state dimension mismatch");
  }
  const Vector x1 = x_original.head(n1);
  const Vector z = UN * x_original.segment(n1, n2);
  const Vector x22 = z.head(n2 - n3);
  const Vector x23 = z.tail(n3);
  const Vector lam = VN * x_original.tail(n3);
  const Vector dx22 = dx22_from_state(x1, x22, u0);
  const Vector rec = multiplier(x1, x22, dx22, u0);
  return {x23.norm(), (lam - rec).norm()};
}

bool GasSplit::multiplier_jump_flag(const std::vector<Vector>& u_samples,
                                    double tol) const {
  if (u_samples.size() < 2 || B32.size() == 0) return false;
  double scale = 0.0;
  for (const Vector& u : u_samples) scale = std::max(scale, (B32 * u).norm());
  for (std::size_t i = 0; i + 1 < u_samples.size(); ++i) {
    if ((B32 * (u_samples[i + 1] - u_samples[i])).norm() > tol * (1.0 + scale)) {
      return true;
    }
  }
  return false;
}

}  // namespace phdae
