#pragma once

#include "phdae/matfun.hpp"

namespace phdae {

/// Linear descriptor system with port-Hamiltonian coefficient structure,
///
///   E(t) x' = [(J(t) - R(t)) Q(t) - E(t) K(t)] x + (B(t) - P(t)) u,
///   y       = (B(t) + P(t))^T Q(t) x + (S(t) + N(t)) u,
///
/// on the interval [t0, tf]. Assembly checks shapes only; the defining
/// structural conditions are verified explicitly by verify_structure().
/// Instances are immutable after assembly and all member operations are pure.
struct PHDAESystem {
  Index n = 0;  ///< state dimension
  Index m = 0;  ///< input/output dimension
  double t0 = 0.0;
  double tf = 1.0;
  MatFun E, Q, J, R, K;  // n x n
  MatFun B, P;           // n x m
  MatFun S, N;           // m x m

  static PHDAESystem assemble(MatFun E, MatFun Q, MatFun J, MatFun R, MatFun K,
                              MatFun B, MatFun P, MatFun S, MatFun N,
                              double t0, double tf);

  /// Convenience assembly with Q = I, K = 0 and no ports (m = 0).
  static PHDAESystem pencil(MatFun E, MatFun J, MatFun R, double t0, double tf);

  /// H(x, t) = 1/2 x^T Q^T(t) E(t) x, evaluated via the symmetrized matrix.
  double hamiltonian(const Vector& x, double t) const;

  /// Dissipation block W(t) = [[Q^T R Q, Q^T P], [P^T Q, S]], (n+m) x (n+m).
  Matrix w_matrix(double t) const;

  /// State-equation coefficient (J - R) Q - E K at time t.
  Matrix a_matrix(double t) const;
  /// Input coefficient B - P at time t.
  Matrix b_matrix(double t) const;
  /// Output y = C x + D u with C = (B + P)^T Q and D = S + N.
  Matrix c_matrix(double t) const;
  Matrix d_matrix(double t) const;

  bool is_constant() const;

  std::vector<double> grid(Index points) const;
};

/// Residuals and verdicts for the three defining pHDAE conditions,
/// evaluated on a uniform time grid with exact polynomial derivatives.
struct StructureReport {
  double skew_symmetry_residual = 0.0;      ///< max ||Q^T E - E^T Q||_F
  double derivative_identity_residual = 0.0;///< max ||d/dt(Q^T E) - Q^T(EK - JQ) - (EK - JQ)^T Q||_F
  double min_eig_QTE = 0.0;                 ///< min eigenvalue of sym(Q^T E) over the grid
  double min_eig_W = 0.0;                   ///< min eigenvalue of sym(W) over the grid
  double tol = 0.0;
  Index grid_points = 0;
  bool symmetry_ok = false;
  bool derivative_identity_ok = false;
  bool qte_psd_ok = false;
  bool w_psd_ok = false;
  bool passed = false;
};

/// Checks Q^T E symmetry, the skew-adjointness derivative identity, and
/// pointwise positive semidefiniteness of sym(Q^T E) and W on a uniform
/// grid. PSD acceptance is scale-invariant: min eigenvalue >= -tol * (1 + ||.||_2).
/// Failures are reported, never thrown.
StructureReport verify_structure(const PHDAESystem& sys, Index grid_points = 33,
                                 double tol = 1e-10);

}  // namespace phdae
