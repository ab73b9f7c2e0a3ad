#pragma once

#include <functional>

#include "phdae/matfun.hpp"

namespace phdae {

/// Least-squares polynomial fit of a matrix-valued function on [t0, tf],
/// sampled at Chebyshev nodes, returned in the monomial basis. When
/// `residual` is given it receives the max fit error on a uniform check grid.
MatFun fit_matfun(const std::function<Matrix(double)>& f, Index rows, Index cols,
                  double t0, double tf, int degree, double* residual = nullptr,
                  Index check_points = 33);

/// Exact sub-block of a matrix polynomial (blockwise on every coefficient).
MatFun block(const MatFun& f, Index row, Index col, Index rows, Index cols);

}  // namespace phdae
