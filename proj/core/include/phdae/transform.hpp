#pragma once

#include "phdae/system.hpp"

namespace phdae {

/// Change-of-basis pair for the structure-preserving congruence
/// E~ = U^T E V, Q~ = U^-1 Q V, J~ = U^T J U, R~ = U^T R U,
/// B~ = U^T B, P~ = U^T P, K~ = V^-1 K V + V^-1 V'.
/// Both factors must be pointwise invertible on the verification grid.
struct TransformPair {
  MatFun U;
  MatFun V;
};

struct CongruenceOptions {
  Index grid_points = 33;      ///< invertibility / residual verification grid
  int max_refit_degree = 12;   ///< polynomial degree for inverse-bearing products
  double refit_tol = 1e-8;     ///< max allowed pointwise re-fit residual
  double singular_tol = 1e-12; ///< sigma_min threshold, relative to sigma_max
};

struct CongruenceResult {
  PHDAESystem system;
  double max_cond_U = 1.0;       ///< worst conditioning of U(t) on the grid
  double max_cond_V = 1.0;
  double refit_residual = 0.0;   ///< 0 when the exact path applied
  bool refit_used = false;
};

/// Structure- and Hamiltonian-preserving transformation. Products that
/// involve no inverses stay exact polynomials. U^-1 Q V and V^-1(K V + V')
/// are exact when U, V are constant; otherwise they are sampled on a
/// Chebyshev grid and re-fit as polynomials of bounded degree, with the fit
/// residual reported and checked against refit_tol.
CongruenceResult congruence(const PHDAESystem& sys, const TransformPair& tp,
                            const CongruenceOptions& opts = {});

/// Coefficient path sampled at discrete times; used for transformed systems
/// whose coefficients are no longer polynomial (K-elimination).
struct SampledSystem {
  Index n = 0;
  Index m = 0;
  std::vector<double> times;
  std::vector<Matrix> E, Q, J, R, B, P, S, N;  // K is identically zero
};

struct KEliminationResult {
  SampledSystem system;
  std::vector<Matrix> V_K;  ///< solution path of V' = V K, V(t0) = I
};

/// Removes the K coefficient by the scaling V_K solving V' = V K(t),
/// V(t0) = I (classical RK4 with `steps` uniform steps). The returned
/// sampled system has E <- E V_K^-1, Q <- Q V_K^-1 and the same Hamiltonian
/// along x = V_K x~.
KEliminationResult eliminate_k(const PHDAESystem& sys, Index steps = 200,
                               double singular_tol = 1e-12);

/// Compression of a skew-adjoint operator pair (E, A) by a possibly
/// rectangular V: returns (V^T E V, V^T A V - V^T E V'). The input pair must
/// satisfy E^T = E and E' = -(A + A^T) on [t0, tf]; the result satisfies the
/// same identities by construction.
std::pair<MatFun, MatFun> compress_operator(const MatFun& E, const MatFun& A,
                                            const MatFun& V, double t0, double tf,
                                            Index grid_points = 33, double tol = 1e-10);

}  // namespace phdae
