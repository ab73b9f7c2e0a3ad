#pragma once

#include "phdae/index.hpp"
#include "phdae/transform.hpp"

namespace phdae {

/// Index-one canonical form: the system transformed so that
///   E = [[E11, 0], [0, 0]],  Q = [[Q11, 0], [0, Q22]],
/// with E11 invertible, Q11^T E11 = E11^T Q11, invertible L22 = J22 - R22
/// and Q22, and the structural zero (J12 - R12) Q22 - E11 K12 = 0.
///
/// The form is produced by applying the structure-preserving congruence with
/// U = U~ T and V = V~ T~ built from a sign-fixed SVD of E, so all blocks are
/// read off a genuinely transformed pHDAE rather than assembled from printed
/// formulas. Constant systems take an exact path; polynomial systems are
/// canonicalized pointwise and re-fit.
struct CanonicalIndexOne {
  Index n1 = 0;  ///< rank of E (size of the differential block)
  Index n2 = 0;  ///< n - n1 (size of the algebraic block)
  PHDAESystem system;  ///< transformed pHDAE in canonical coordinates
  MatFun U, V;         ///< transforms used: system = congruence(input, {U, V})
  double structural_zero_residual = 0.0;  ///< max ||(J12 - R12) Q22 - E11 K12||
  double q_offdiag_residual = 0.0;        ///< max ||Q12|| and ||Q21|| after transform
  double refit_residual = 0.0;

  MatFun E11() const;
  MatFun Q11() const;
  MatFun Q22() const;
  MatFun L11() const;
  MatFun L12() const;
  MatFun L21() const;
  MatFun L22() const;
  MatFun J11() const;
  MatFun R11() const;
  MatFun R12() const;
  MatFun J21() const;
  MatFun K11() const;
  MatFun K12() const;
  MatFun B1() const;
  MatFun B2() const;
  MatFun P1() const;
  MatFun P2() const;
};

CanonicalIndexOne index_one_canonical(const PHDAESystem& sys, double tol = 1e-9);

/// Reduced implicit pH system on the differential block, with the algebraic
/// block recovered by an affine map and a consistency test at t0.
struct ReducedSystem {
  Index n1 = 0;
  Index n2 = 0;
  PHDAESystem ode;     ///< (E11, Q11, J11, R11, K11, B^, P^, S^, N^)
  MatFun x2_from_x1;   ///< n2 x n1: x2 = x2_from_x1 x1 + x2_from_u u
  MatFun x2_from_u;    ///< n2 x m
  MatFun U, V;         ///< canonical transforms (x_original = V [x1; x2])
  MatFun L22Q22, L21Q11, B2mP2;  // constraint coefficients

  /// || L22 Q22 x2 + L21 Q11 x1 + (B2 - P2) u || at time t.
  double constraint_residual(const Vector& x1, const Vector& x2, const Vector& u,
                             double t) const;
  /// Consistency of an initial state given in original coordinates (eq. at t0).
  double consistency_residual(const Vector& x_original, const Vector& u0,
                              double t0) const;
  /// Original coordinates from the reduced state and the input.
  Vector lift(const Vector& x1, const Vector& u, double t) const;
  /// Differential component of an original-coordinates state.
  Vector split_x1(const Vector& x_original, double t) const;
};

ReducedSystem reduce_index_one(const CanonicalIndexOne& canonical);

/// High-index regularization: appends the hidden constraints A3 x = 0,
/// changes variables so the pinned combinations become trailing coordinates
/// x3 with x3 = 0, and row-compresses Q so the leading square subsystem is a
/// pHDAE of index at most one. Constant coefficients only.
struct RegularizedSystem {
  bool identity = false;      ///< no hidden constraints: input passed through
  Index pinned = 0;           ///< number of trailing variables pinned to zero
  PHDAESystem overdetermined; ///< transformed full system; constraint is x3 = 0
  PHDAESystem subsystem;      ///< leading (n - pinned)-dim index <= 1 pHDAE
  Matrix V;                   ///< x_original = V * x_new
  Matrix U1, U2;              ///< orthogonal row transforms applied
  Matrix A33;                 ///< invertible pinning block
};

RegularizedSystem regularize_high_index(const PHDAESystem& sys, const IndexData& idx,
                                        double tol = 1e-9);

/// Structure-exploiting reduction of the gas-network form: splits the flux
/// variables along the SVD of N~^T, pins x23 = 0, returns the implicit pH
/// ODE on (x1, x22), the multiplier recovery map, and the t0 consistency test.
struct GasSplit {
  Index n1 = 0, n2 = 0, n3 = 0;
  Matrix M1, M22, M23, M33;
  Matrix D22, D23, D33;
  Matrix G12, G13;
  Matrix B22, B32;
  Matrix Sigma;  ///< n3 x n3 invertible diagonal
  Matrix UN;     ///< n2 x n2 orthogonal: [x22; x23] = UN x2
  Matrix VN;     ///< n3 x n3 orthogonal: multiplier' = VN x3
  PHDAESystem reduced_ode;  ///< dimension n1 + (n2 - n3), m inputs

  /// Multiplier (in the rotated coordinates) from the reduced state, its
  /// flux derivative and the input.
  Vector multiplier(const Vector& x1, const Vector& x22, const Vector& dx22,
                    const Vector& u) const;
  /// dx22 implied by the reduced ODE, for consistency checks at t0.
  Vector dx22_from_state(const Vector& x1, const Vector& x22, const Vector& u) const;
  /// Residuals of the t0 consistency conditions for an initial state given in
  /// original coordinates: {||x23(0)||, ||multiplier(0) - recovered||}.
  std::pair<double, double> consistency_residuals(const Vector& x_original,
                                                  const Vector& u0) const;
  /// Flags multiplier discontinuities: true when B32 u jumps between samples.
  bool multiplier_jump_flag(const std::vector<Vector>& u_samples,
                            double tol = 1e-6) const;
};

GasSplit gas_reduction(const PHDAESystem& sys, Index n1, Index n2, Index n3,
                       double tol = 1e-9);

}  // namespace phdae
