#pragma once

#include "phdae/types.hpp"

namespace phdae {

// Default relative threshold for numerical rank decisions: singular values
// below tol * sigma_max * max(rows, cols) count as zero.
inline constexpr double kRankTol = 1e-11;

Index numerical_rank(const Matrix& a, double tol = kRankTol);

/// Orthonormal columns z with z^T a = 0 (left null space basis).
Matrix left_nullspace(const Matrix& a, double tol = kRankTol);

/// Orthonormal columns v with a v = 0.
Matrix nullspace(const Matrix& a, double tol = kRankTol);

/// Orthonormal rows spanning the row space of a.
Matrix orthonormal_rowspace(const Matrix& a, double tol = kRankTol);

/// Orthonormal rows spanning rowspace(a) ∩ rowspace(b)^⊥.
Matrix rowspace_complement(const Matrix& a, const Matrix& b, double tol = kRankTol);

double smallest_singular_value(const Matrix& a);
double condition_number(const Matrix& a);

/// Smallest eigenvalue of the symmetric part of a.
double min_eigenvalue_sym(const Matrix& a);
}  // namespace phdae
