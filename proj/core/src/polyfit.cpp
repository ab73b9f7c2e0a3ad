#include "phdae/polyfit.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace phdae {

MatFun fit_matfun(const std::function<Matrix(double)>& f, Index rows, Index cols,
                  double t0, double tf, int degree, double* residual,
                  Index check_points) {
  if (degree < 0) throw ShapeError("fit_matfun: degree must be >= 0");
  const int nodes = std::max(2 * (degree + 1), 33);
  const double mid = 0.5 * (t0 + tf);
  const double half = 0.5 * (tf - t0);
  if (!(half > 0.0)) throw ShapeError("fit_matfun: requires t0 < tf");

  Eigen::MatrixXd vand(nodes, degree + 1);
  std::vector<Matrix> samples(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double tau = -std::cos(M_PI * (i + 0.5) / nodes);
    double p = 1.0;
    for (int j = 0; j <= degree; ++j) {
      vand(i, j) = p;
      p *= tau;
    }
    samples[i] = f(mid + half * tau);
    if (samples[i].rows() != rows || samples[i].cols() != cols) {
      throw ShapeError("fit_matfun: sample shape mismatch");
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(vand);
  std::vector<Matrix> tau_coeffs(degree + 1, Matrix::Zero(rows, cols));
  Eigen::VectorXd rhs(nodes);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      for (int i = 0; i < nodes; ++i) rhs(i) = samples[i](r, c);
      const Eigen::VectorXd sol = qr.solve(rhs);
      for (int j = 0; j <= degree; ++j) tau_coeffs[j](r, c) = sol(j);
    }
  }

  // Expand sum_j C_j tau^j, tau = (t - mid)/half, into monomials in t.
  std::vector<Matrix> t_coeffs(degree + 1, Matrix::Zero(rows, cols));
  std::vector<double> binom(degree + 1, 0.0);
  for (int j = 0; j <= degree; ++j) {
    binom[0] = 1.0;
    for (int k = 1; k <= j; ++k) binom[k] = binom[k - 1] * (j - k + 1) / k;
    const double inv_half_j = std::pow(1.0 / half, j);
    for (int k = 0; k <= j; ++k) {
      const double w = binom[k] * std::pow(-mid, j - k) * inv_half_j;
      t_coeffs[k] += w * tau_coeffs[j];
    }
  }
  MatFun fit{std::move(t_coeffs)};

  if (residual != nullptr) {
    *residual = 0.0;
    for (Index i = 0; i < check_points; ++i) {
      const double t = t0 + (tf - t0) * static_cast<double>(i) /
                                static_cast<double>(check_points - 1);
      *residual = std::max(*residual, (fit(t) - f(t)).norm());
    }
  }
  return fit;
}

MatFun block(const MatFun& f, Index row, Index col, Index rows, Index cols) {
  if (row < 0 || col < 0 || row + rows > f.rows() || col + cols > f.cols()) {
    throw ShapeError("block: index range outside the matrix function");
  }
  std::vector<Matrix> out;
  out.reserve(f.coefficients().size());
  for (const Matrix& c : f.coefficients()) {
    out.push_back(c.block(row, col, rows, cols));
  }
  return MatFun(std::move(out));
}

}  // namespace phdae
