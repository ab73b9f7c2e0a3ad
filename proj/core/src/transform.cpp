#include "phdae/transform.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>

#include "phdae/linalg.hpp"
#include "phdae/polyfit.hpp"

namespace phdae {

namespace {

void check_invertible_on_grid(const MatFun& f, const PHDAESystem& sys,
                              Index grid_points, double tol, const char* name,
                              double* max_cond) {
  *max_cond = 1.0;
  for (double t : sys.grid(grid_points)) {
    Eigen::JacobiSVD<Matrix> svd(f(t));
    const double smax = svd.singularValues().maxCoeff();
    const double smin = svd.singularValues().minCoeff();
    if (smin <= tol * std::max(1.0, smax)) {
      throw NumericalError(std::string("congruence: ") + name + " singular at t=" +
                           std::to_string(t) + " (sigma_min=" + std::to_string(smin) + ")");
    }
    *max_cond = std::max(*max_cond, smax / smin);
  }
}

}  // namespace

CongruenceResult congruence(const PHDAESystem& sys, const TransformPair& tp,
                            const CongruenceOptions& opts) {
  if (tp.U.rows() != sys.n || tp.U.cols() != sys.n || tp.V.rows() != sys.n ||
      tp.V.cols() != sys.n) {
    throw ShapeError("congruence: transform factors must be n x n");
  }

  CongruenceResult res;
  check_invertible_on_grid(tp.U, sys, opts.grid_points, opts.singular_tol, "U",
                           &res.max_cond_U);
  check_invertible_on_grid(tp.V, sys, opts.grid_points, opts.singular_tol, "V",
                           &res.max_cond_V);

  const MatFun ut = tp.U.transpose();
  MatFun e = ut * sys.E * tp.V;
  MatFun j = ut * sys.J * tp.U;
  MatFun r = ut * sys.R * tp.U;
  MatFun b = ut * sys.B;
  MatFun p = ut * sys.P;

  MatFun q = MatFun::zero(sys.n, sys.n);
  MatFun k = MatFun::zero(sys.n, sys.n);
  if (tp.U.is_constant() && tp.V.is_constant()) {
    // Exact path: coefficient-wise linear solves, no re-fit.
    const Matrix u0 = tp.U(0.0);
    const Matrix v0 = tp.V(0.0);
    const Eigen::PartialPivLU<Matrix> lu_u(u0);
    const Eigen::PartialPivLU<Matrix> lu_v(v0);
    std::vector<Matrix> qc;
    for (const Matrix& c : sys.Q.coefficients()) qc.push_back(lu_u.solve(c * v0));
    q = MatFun(std::move(qc));
    std::vector<Matrix> kc;
    for (const Matrix& c : sys.K.coefficients()) kc.push_back(lu_v.solve(c * v0));
    k = MatFun(std::move(kc));
  } else {
    res.refit_used = true;
    const MatFun vdot = tp.V.derivative();
    const auto qfun = [&](double t) -> Matrix {
      return tp.U(t).partialPivLu().solve(sys.Q(t) * tp.V(t));
    };
    const auto kfun = [&](double t) -> Matrix {
      return tp.V(t).partialPivLu().solve(sys.K(t) * tp.V(t) + vdot(t));
    };
    double rq = 0.0, rk = 0.0;
    q = fit_matfun(qfun, sys.n, sys.n, sys.t0, sys.tf, opts.max_refit_degree, &rq,
                   opts.grid_points);
    k = fit_matfun(kfun, sys.n, sys.n, sys.t0, sys.tf, opts.max_refit_degree, &rk,
                   opts.grid_points);
    res.refit_residual = std::max(rq, rk);
    if (res.refit_residual > opts.refit_tol) {
      throw NumericalError("congruence: polynomial re-fit residual " +
                           std::to_string(res.refit_residual) + " exceeds tolerance " +
                           std::to_string(opts.refit_tol));
    }
  }

  res.system = PHDAESystem::assemble(std::move(e), std::move(q), std::move(j),
                                     std::move(r), std::move(k), std::move(b),
                                     std::move(p), sys.S, sys.N, sys.t0, sys.tf);
  return res;
}

KEliminationResult eliminate_k(const PHDAESystem& sys, Index steps, double singular_tol) {
  if (steps < 2) throw ShapeError("eliminate_k: steps must be >= 2");

  const Index n = sys.n;
  const double h = (sys.tf - sys.t0) / static_cast<double>(steps);
  const auto rhs = [&](double t, const Matrix& v) -> Matrix { return v * sys.K(t); };

  KEliminationResult out;
  out.system.n = n;
  out.system.m = sys.m;
  out.V_K.reserve(steps + 1);

  Matrix v = Matrix::Identity(n, n);
  double t = sys.t0;
  out.V_K.push_back(v);
  out.system.times.push_back(t);
  for (Index i = 0; i < steps; ++i) {
    const Matrix k1 = rhs(t, v);
    const Matrix k2 = rhs(t + 0.5 * h, v + 0.5 * h * k1);
    const Matrix k3 = rhs(t + 0.5 * h, v + 0.5 * h * k2);
    const Matrix k4 = rhs(t + h, v + h * k3);
    v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = sys.t0 + h * static_cast<double>(i + 1);
    out.V_K.push_back(v);
    out.system.times.push_back(t);
  }

  for (std::size_t i = 0; i < out.V_K.size(); ++i) {
    const Matrix& vk = out.V_K[i];
    Eigen::JacobiSVD<Matrix> svd(vk);
    const double smin = svd.singularValues().minCoeff();
    if (smin <= singular_tol * std::max(1.0, svd.singularValues().maxCoeff())) {
      throw NumericalError("eliminate_k: V_K numerically singular at t=" +
                           std::to_string(out.system.times[i]));
    }
    const Eigen::PartialPivLU<Matrix> lut(vk.transpose());
    const double tt = out.system.times[i];
    // Right-multiplication by V_K^-1 via transposed solves.
    out.system.E.push_back(lut.solve(sys.E(tt).transpose()).transpose());
    out.system.Q.push_back(lut.solve(sys.Q(tt).transpose()).transpose());
    out.system.J.push_back(sys.J(tt));
    out.system.R.push_back(sys.R(tt));
    out.system.B.push_back(sys.B(tt));
    out.system.P.push_back(sys.P(tt));
    out.system.S.push_back(sys.S(tt));
    out.system.N.push_back(sys.N(tt));
  }
  return out;
}

std::pair<MatFun, MatFun> compress_operator(const MatFun& E, const MatFun& A,
                                            const MatFun& V, double t0, double tf,
                                            Index grid_points, double tol) {
  if (E.rows() != E.cols() || A.rows() != A.cols() || E.rows() != A.rows()) {
    throw ShapeError("compress_operator: E and A must be square of equal size");
  }
  if (V.rows() != E.rows()) {
    throw ShapeError("compress_operator: V must have as many rows as E");
  }

  // Input pair must be skew-adjoint: E^T = E and E' = -(A + A^T).
  const MatFun sym_gap = E - E.transpose();
  const MatFun adj_gap = E.derivative() + A + A.transpose();
  double worst = 0.0;
  for (Index i = 0; i < grid_points; ++i) {
    const double t =
        t0 + (tf - t0) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    worst = std::max(worst, std::max(sym_gap(t).norm(), adj_gap(t).norm()));
  }
  if (worst > tol * (1.0 + E.coefficient_scale() + A.coefficient_scale())) {
    throw NumericalError("compress_operator: input pair is not skew-adjoint (residual " +
                         std::to_string(worst) + ")");
  }

  const MatFun vt = V.transpose();
  MatFun e_out = vt * E * V;
  MatFun a_out = vt * A * V - vt * E * V.derivative();
  return {std::move(e_out), std::move(a_out)};
}

}  // namespace phdae
