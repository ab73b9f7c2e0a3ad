#pragma once

#include <vector>

#include "phdae/types.hpp"

namespace phdae {

/// Matrix-valued polynomial in time, M(t) = C_0 + C_1 t + ... + C_k t^k.
///
/// The polynomial basis keeps derivatives exact, so structural identities
/// that compare a derivative against an algebraic expression can be checked
/// without finite-difference noise. Values are immutable after construction
/// and safe to share across threads.
class MatFun {
 public:
  /// Empty 0 x 0 constant; placeholder for not-yet-assigned coefficients.
  MatFun() : coeffs_{Matrix::Zero(0, 0)} {}

  /// Coefficients must be nonempty and share a common shape.
  explicit MatFun(std::vector<Matrix> coeffs);

  static MatFun constant(Matrix c);
  static MatFun zero(Index rows, Index cols);
  static MatFun identity(Index n);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  /// Polynomial degree after construction-time trimming of zero leading terms.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_constant() const { return coeffs_.size() == 1; }
  const std::vector<Matrix>& coefficients() const { return coeffs_; }

  /// Horner evaluation.
  Matrix operator()(double t) const;

  MatFun derivative() const;
  MatFun transpose() const;
  MatFun scaled(double s) const;

  MatFun operator+(const MatFun& other) const;
  MatFun operator-(const MatFun& other) const;
  /// Coefficient convolution; exact, degree = sum of degrees.
  MatFun operator*(const MatFun& other) const;

  /// Max coefficient magnitude, used for scale-aware tolerances.
  double coefficient_scale() const;

 private:
  std::vector<Matrix> coeffs_;
  Index rows_ = 0;
  Index cols_ = 0;
};

MatFun operator*(const Matrix& a, const MatFun& m);
MatFun operator*(const MatFun& m, const Matrix& a);

}  // namespace phdae
