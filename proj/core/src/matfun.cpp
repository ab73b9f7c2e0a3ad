#include "phdae/matfun.hpp"

#include <cmath>
#include <utility>

namespace phdae {

MatFun::MatFun(std::vector<Matrix> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) {
    throw ShapeError("MatFun: empty coefficient list (use an explicit zero matrix)");
  }
  rows_ = coeffs_.front().rows();
  cols_ = coeffs_.front().cols();
  for (const Matrix& c : coeffs_) {
    if (c.rows() != rows_ || c.cols() != cols_) {
      throw ShapeError("MatFun: coefficient shapes differ");
    }
  }
  // Trim exactly-zero leading coefficients so degree() is meaningful.
  while (coeffs_.size() > 1 && coeffs_.back().isZero(0.0)) {
    coeffs_.pop_back();
  }
}

MatFun MatFun::constant(Matrix c) { return MatFun({std::move(c)}); }

MatFun MatFun::zero(Index rows, Index cols) {
  return MatFun({Matrix::Zero(rows, cols)});
}

MatFun MatFun::identity(Index n) { return MatFun({Matrix::Identity(n, n)}); }

Matrix MatFun::operator()(double t) const {
  if (!std::isfinite(t)) throw ShapeError("MatFun: evaluation time must be finite");
  Matrix acc = coeffs_.back();
  for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) {
    acc = *it + t * acc;
  }
  return acc;
}

MatFun MatFun::derivative() const {
  if (coeffs_.size() == 1) return MatFun::zero(rows_, cols_);
  std::vector<Matrix> d;
  d.reserve(coeffs_.size() - 1);
  for (std::size_t j = 1; j < coeffs_.size(); ++j) {
    d.push_back(static_cast<double>(j) * coeffs_[j]);
  }
  return MatFun(std::move(d));
}

MatFun MatFun::transpose() const {
  std::vector<Matrix> t;
  t.reserve(coeffs_.size());
  for (const Matrix& c : coeffs_) t.push_back(c.transpose());
  return MatFun(std::move(t));
}

MatFun MatFun::scaled(double s) const {
  std::vector<Matrix> out;
  out.reserve(coeffs_.size());
  for (const Matrix& c : coeffs_) out.push_back(s * c);
  return MatFun(std::move(out));
}

MatFun MatFun::operator+(const MatFun& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw ShapeError("MatFun: shape mismatch in addition");
  }
  std::vector<Matrix> out(std::max(coeffs_.size(), other.coeffs_.size()),
                          Matrix::Zero(rows_, cols_));
  for (std::size_t j = 0; j < coeffs_.size(); ++j) out[j] += coeffs_[j];
  for (std::size_t j = 0; j < other.coeffs_.size(); ++j) out[j] += other.coeffs_[j];
  return MatFun(std::move(out));
}

MatFun MatFun::operator-(const MatFun& other) const {
  return *this + other.scaled(-1.0);
}

MatFun MatFun::operator*(const MatFun& other) const {
  if (cols_ != other.rows_) {
    throw ShapeError("MatFun: inner dimensions mismatch in product");
  }
  std::vector<Matrix> out(coeffs_.size() + other.coeffs_.size() - 1,
                          Matrix::Zero(rows_, other.cols_));
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < other.coeffs_.size(); ++j) {
      out[i + j] += coeffs_[i] * other.coeffs_[j];
    }
  }
  return MatFun(std::move(out));
}

double MatFun::coefficient_scale() const {
  double s = 0.0;
  for (const Matrix& c : coeffs_) {
    if (c.size() > 0) s = std::max(s, c.cwiseAbs().maxCoeff());
  }
  return s;
}

MatFun operator*(const Matrix& a, const MatFun& m) {
  return MatFun::constant(a) * m;
}

MatFun operator*(const MatFun& m, const Matrix& a) {
  return m * MatFun::constant(a);
}

}  // namespace phdae
