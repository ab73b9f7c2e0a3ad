#include "phdae/index.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <sstream>

#include "phdae/linalg.hpp"

namespace phdae {

namespace {

// u-free part of a constraint row space: rows w in span(basis) with w_u = 0.
// Returned with the u columns zeroed exactly.
Matrix input_free_rows(const Matrix& basis, Index n, Index m, double tol) {
  if (basis.rows() == 0) return Matrix::Zero(0, n + m);
  if (m == 0) return basis;
  const Matrix bu = basis.rightCols(m);
  const Matrix y = nullspace(bu.transpose(), tol);  // y^T basis has zero u-part
  Matrix rows = (y.transpose() * basis).eval();
  if (rows.rows() == 0) return Matrix::Zero(0, n + m);
  rows.rightCols(m).setZero();
  return orthonormal_rowspace(rows, tol);
}

}  // namespace

BehaviorPencil BehaviorPencil::from_system(const PHDAESystem& sys, bool zero_input) {
  if (!sys.is_constant()) {
    throw ShapeError(
        "strangeness analysis supports constant coefficients only; "
        "time-varying systems get structure verification and transformation "
        "but no automated index analysis");
  }
  const double t = sys.t0;
  BehaviorPencil p;
  p.n = sys.n;
  p.m = zero_input ? 0 : sys.m;
  p.Eb = Matrix::Zero(p.n, p.n + p.m);
  p.Ab = Matrix::Zero(p.n, p.n + p.m);
  p.Eb.leftCols(p.n) = sys.E(t);
  p.Ab.leftCols(p.n) = sys.a_matrix(t);
  if (p.m > 0) p.Ab.rightCols(p.m) = sys.b_matrix(t);
  return p;
}

DerivativeArray derivative_array(const BehaviorPencil& p, Index level) {
  if (level < 0) throw ShapeError("derivative_array: level must be >= 0");
  const Index n = p.n;
  const Index w = p.n + p.m;
  DerivativeArray arr;
  arr.M = Matrix::Zero((level + 1) * n, (level + 1) * w);
  arr.N = Matrix::Zero((level + 1) * n, w);
  for (Index i = 0; i <= level; ++i) {
    arr.M.block(i * n, i * w, n, w) = p.Eb;
    if (i > 0) arr.M.block(i * n, (i - 1) * w, n, w) = -p.Ab;
  }
  arr.N.topRows(n) = p.Ab;
  return arr;
}

IndexData strangeness_analysis(const BehaviorPencil& p, Index mu_max, double tol) {
  if (mu_max < 0) throw ShapeError("strangeness_analysis: mu_max must be >= 0");
  const Index n = p.n;
  const Index m = p.m;
  const Index w = n + m;

  const Matrix explicit_rows =
      orthonormal_rowspace(left_nullspace(p.Eb, tol).transpose() * p.Ab, tol);

  IndexData out;
  out.tol = tol;
  Index prev_corank = 0;  // corank of the level -1 array, by convention 0

  for (Index mu = 0; mu <= mu_max; ++mu) {
    const DerivativeArray arr = derivative_array(p, mu);

    Matrix full(arr.M.rows(), w + arr.M.cols());
    full.leftCols(w) = arr.N;
    full.rightCols(arr.M.cols()) = arr.M;

    const Index r = numerical_rank(full, tol);
    const Index rank_m = numerical_rank(arr.M, tol);
    const Index a = r - rank_m;
    const Index corank = arr.M.rows() - r;
    const Index nu = corank - prev_corank;
    prev_corank = corank;

    const Matrix z2_full = left_nullspace(arr.M, tol);
    const Matrix c_full = z2_full.transpose() * arr.N;
    const Index rank_c = numerical_rank(c_full, tol);

    const Matrix t2 = nullspace(c_full, tol);
    const Matrix ebt2 = p.Eb * t2;
    const Index d = numerical_rank(ebt2, tol);

    out.mu = mu;
    out.r = r;
    out.a = a;
    out.d = d;
    out.nu = nu;
    out.T2 = t2;
    out.explicit_rows = explicit_rows;

    // Z2 spans the left-null directions of M that actually produce
    // constraints; trivial 0 = 0 rows are dropped here.
    if (a > 0 && c_full.rows() > 0) {
      Eigen::JacobiSVD<Matrix> svd(c_full, Eigen::ComputeFullU);
      out.Z2 = z2_full * svd.matrixU().leftCols(a);
    } else {
      out.Z2 = Matrix::Zero(arr.M.rows(), 0);
    }
    out.Z1 = orthonormal_rowspace((ebt2).transpose(), tol).transpose();

    out.constraints = orthonormal_rowspace(c_full, tol);
    const Matrix ufree = input_free_rows(out.constraints, n, m, tol);
    const Matrix expl_ufree = input_free_rows(explicit_rows, n, m, tol);
    out.A3 = rowspace_complement(ufree.leftCols(n), expl_ufree.leftCols(n), tol);
    out.A2 = rowspace_complement(out.constraints, ufree, tol);

    const bool ranks_consistent = (rank_c == a) && (d == n - a - nu) && (nu >= 0);
    if (ranks_consistent) {
      out.hypothesis_satisfied = true;

      // Full-row-rank checks on the strangeness-free stacked coefficients.
      const Matrix e1 = out.Z1.transpose() * p.Eb.leftCols(n);
      Matrix dyn(e1.rows() + out.A2.rows() + expl_ufree.rows(), n);
      dyn.topRows(e1.rows()) = e1;
      dyn.middleRows(e1.rows(), out.A2.rows()) = out.A2.leftCols(n);
      dyn.bottomRows(expl_ufree.rows()) = expl_ufree.leftCols(n);
      Matrix all(dyn.rows() + out.A3.rows(), n);
      all.topRows(dyn.rows()) = dyn;
      all.bottomRows(out.A3.rows()) = out.A3;
      out.uode_rank_dyn_full = numerical_rank(dyn, tol) == dyn.rows();
      out.uode_rank_full = numerical_rank(all, tol) == all.rows();
      return out;
    }
  }
  out.hypothesis_satisfied = false;
  return out;
}

bool check_index_le_one(const PHDAESystem& sys, double tol, Index grid_points) {
  Index rank_e = -1;
  for (double t : sys.grid(grid_points)) {
    const Matrix e = sys.E(t);
    Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Index r = 0;
    const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    for (Index i = 0; i < svd.singularValues().size(); ++i) {
      if (svd.singularValues()(i) > kRankTol * smax * sys.n) ++r;
    }
    if (rank_e < 0) rank_e = r;
    if (r != rank_e) {
      std::ostringstream msg;
      msg << "check_index_le_one: rank of E changes across the grid (" << rank_e
          << " vs " << r << " at t=" << t << ")";
      throw NumericalError(msg.str());
    }
    if (r == sys.n) continue;  // no algebraic block at this point

    const Matrix u2 = svd.matrixU().rightCols(sys.n - r);
    const Matrix v2 = svd.matrixV().rightCols(sys.n - r);
    const Matrix l22 = u2.transpose() * (sys.J(t) - sys.R(t)) * u2;
    const Matrix q22 = u2.transpose() * sys.Q(t) * v2;
    const Matrix lq = l22 * q22;
    const double smin = smallest_singular_value(lq);
    if (smin <= tol * std::max(1.0, lq.norm())) return false;
  }
  return true;
}

}  // namespace phdae
