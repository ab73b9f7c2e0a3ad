#include "phdae/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <limits>

namespace phdae {

namespace {

double rank_threshold(const Eigen::JacobiSVD<Matrix>& svd, Index rows, Index cols,
                      double tol) {
  const double smax = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  return tol * smax * static_cast<double>(std::max(rows, cols));
}

Index rank_from_svd(const Eigen::JacobiSVD<Matrix>& svd, Index rows, Index cols,
                    double tol) {
  const double thresh = rank_threshold(svd, rows, cols, tol);
  Index r = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > thresh) ++r;
  }
  return r;
}

}  // namespace

Index numerical_rank(const Matrix& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return rank_from_svd(svd, a.rows(), a.cols(), tol);
}

Matrix left_nullspace(const Matrix& a, double tol) {
  if (a.rows() == 0) return Matrix::Zero(0, 0);
  if (a.cols() == 0) return Matrix::Identity(a.rows(), a.rows());
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU);
  const Index r = rank_from_svd(svd, a.rows(), a.cols(), tol);
  return svd.matrixU().rightCols(a.rows() - r);
}

Matrix nullspace(const Matrix& a, double tol) {
  if (a.cols() == 0) return Matrix::Zero(0, 0);
  if (a.rows() == 0) return Matrix::Identity(a.cols(), a.cols());
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Index r = rank_from_svd(svd, a.rows(), a.cols(), tol);
  return svd.matrixV().rightCols(a.cols() - r);
}

Matrix orthonormal_rowspace(const Matrix& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return Matrix::Zero(0, a.cols());
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Index r = rank_from_svd(svd, a.rows(), a.cols(), tol);
  return svd.matrixV().leftCols(r).transpose();
}

Matrix rowspace_complement(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() == 0) return Matrix::Zero(0, a.cols());
  Matrix proj = a;
  if (b.rows() > 0 && b.cols() == a.cols()) {
    const Matrix vb = orthonormal_rowspace(b, tol);
    proj = a - (a * vb.transpose()) * vb;
  }
  return orthonormal_rowspace(proj, tol);
}

double smallest_singular_value(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().minCoeff();
}

double condition_number(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 1.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const double smin = svd.singularValues().minCoeff();
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return svd.singularValues().maxCoeff() / smin;
}

double min_eigenvalue_sym(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  const Matrix s = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace phdae
