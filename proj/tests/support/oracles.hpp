#pragma once

// Independent reference computations the tests check the library against.
// Everything here deliberately avoids the implementation paths it verifies.

#include <unsupported/Eigen/MatrixFunctions>

#include <vector>

#include "phdae/index.hpp"
#include "phdae/matfun.hpp"

namespace phdae::oracle {

/// Naive power-sum evaluation of a coefficient list (no Horner).
inline Matrix naive_poly_eval(const std::vector<Matrix>& coeffs, double t) {
  Matrix acc = Matrix::Zero(coeffs.front().rows(), coeffs.front().cols());
  double p = 1.0;
  for (const Matrix& c : coeffs) {
    acc += p * c;
    p *= t;
  }
  return acc;
}

/// Central finite-difference quotient of a matrix function.
template <typename F>
Matrix central_difference(F&& f, double t, double h) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

/// Scaling-and-squaring matrix exponential (Eigen's Pade implementation).
inline Matrix expm(const Matrix& a) { return a.exp(); }

/// Differentiation index of a regular pencil E x' = A x by the shuffle
/// algorithm: row-compress E, differentiate the algebraic rows, repeat until
/// E becomes invertible. Returns -1 when the pencil does not regularize
/// within n + 1 shuffles.
inline int shuffle_index(Matrix e, Matrix a, double tol = 1e-10) {
  const Index n = e.rows();
  for (Index iter = 0; iter <= n; ++iter) {
    Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeFullU);
    const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    Index r = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i) {
      if (svd.singularValues()(i) > tol * std::max(1.0, smax)) ++r;
    }
    if (r == n) return static_cast<int>(iter);
    const Matrix eu = svd.matrixU().transpose() * e;
    const Matrix au = svd.matrixU().transpose() * a;
    Matrix e_next(n, n), a_next(n, n);
    e_next.topRows(r) = eu.topRows(r);
    e_next.bottomRows(n - r) = au.bottomRows(n - r);
    a_next.topRows(r) = au.topRows(r);
    a_next.bottomRows(n - r).setZero();
    e = e_next;
    a = a_next;
  }
  return -1;
}

/// Independently stacked derivative array for a constant behavior pencil,
/// written as straight index loops over the differentiated equations.
struct StackedArray {
  Matrix M;
  Matrix N;
};

inline StackedArray stack_derivative_array(const Matrix& eb, const Matrix& ab,
                                           Index level) {
  const Index n = eb.rows();
  const Index w = eb.cols();
  StackedArray s;
  s.M = Matrix::Zero((level + 1) * n, (level + 1) * w);
  s.N = Matrix::Zero((level + 1) * n, w);
  for (Index i = 0; i <= level; ++i) {
    for (Index j = 0; j <= level; ++j) {
      if (j == i) s.M.block(i * n, j * w, n, w) = eb;
      if (j + 1 == i) s.M.block(i * n, j * w, n, w) = -ab;
    }
  }
  s.N.topRows(n) = ab;
  return s;
}

inline Index svd_rank(const Matrix& a, double tol = 1e-10) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  Index r = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > tol * std::max(1.0, smax)) ++r;
  }
  return r;
}

/// Brute-force strangeness characteristic values at one level, computed with
/// plain SVD ranks; independent of the library's analysis path.
struct BruteForceLevel {
  Index r, rank_m, a, d, corank;
  bool holds;  // d == n - a - nu given the previous corank
  Index nu;
};

inline BruteForceLevel brute_force_level(const Matrix& eb, const Matrix& ab,
                                         Index level, Index prev_corank) {
  const StackedArray s = stack_derivative_array(eb, ab, level);
  BruteForceLevel out{};
  Matrix full(s.M.rows(), s.N.cols() + s.M.cols());
  full << s.N, s.M;
  out.r = svd_rank(full);
  out.rank_m = svd_rank(s.M);
  out.a = out.r - out.rank_m;
  out.corank = s.M.rows() - out.r;
  out.nu = out.corank - prev_corank;
  // Z2: left-null of M; T2: kernel of Z2^T N; d = rank(Eb T2).
  Eigen::JacobiSVD<Matrix> msvd(s.M, Eigen::ComputeFullU);
  const Matrix z2 = msvd.matrixU().rightCols(s.M.rows() - out.rank_m);
  const Matrix c = z2.transpose() * s.N;
  Eigen::JacobiSVD<Matrix> csvd(c, Eigen::ComputeFullV);
  const Index rc = svd_rank(c);
  const Matrix t2 = csvd.matrixV().rightCols(c.cols() - rc);
  out.d = svd_rank(eb * t2);
  out.holds = (rc == out.a) && (out.d == eb.rows() - out.a - out.nu);
  return out;
}

/// Consistent-state set of a constant pencil: states satisfying every
/// constraint visible in the derivative array up to the given level.
/// Returned as an orthonormal kernel basis.
inline Matrix consistent_state_space(const Matrix& e, const Matrix& a, Index levels,
                                     double tol = 1e-10) {
  const StackedArray s = stack_derivative_array(e, a, levels);
  Eigen::JacobiSVD<Matrix> msvd(s.M, Eigen::ComputeFullU);
  const Index rm = svd_rank(s.M, tol);
  const Matrix z2 = msvd.matrixU().rightCols(s.M.rows() - rm);
  const Matrix constraints = z2.transpose() * s.N;
  Eigen::JacobiSVD<Matrix> csvd(constraints, Eigen::ComputeFullV);
  const Index rc = svd_rank(constraints, tol);
  return csvd.matrixV().rightCols(constraints.cols() - rc);
}

}  // namespace phdae::oracle
