#pragma once

#include "phdae/linalg.hpp"
#include "phdae/system.hpp"

namespace phdae {

/// Constant-coefficient behavior pencil Eb v' = Ab v for the descriptor
/// vector v = [x; u]: Eb = [E, 0], Ab = [(J - R) Q - E K, B - P].
struct BehaviorPencil {
  Matrix Eb;
  Matrix Ab;
  Index n = 0;  ///< number of equations / states
  Index m = 0;  ///< number of behavior input columns (0 when inputs are fixed to zero)

  /// Requires constant coefficients; time-varying systems are refused with a
  /// diagnostic. With zero_input = true the input columns are dropped, which
  /// analyzes the system under u = 0.
  static BehaviorPencil from_system(const PHDAESystem& sys, bool zero_input = false);
};

/// Stacked derivative array at level mu, in the convention
///   M * (v', v'', ..., v^(mu+1))^T = N * v.
/// Block row i carries -Ab in the v^(i) column and Eb in the v^(i+1) column;
/// N has Ab in its first block row and zeros below.
struct DerivativeArray {
  Matrix M;  ///< (mu+1)n x (mu+1)(n+m)
  Matrix N;  ///< (mu+1)n x (n+m)
};

DerivativeArray derivative_array(const BehaviorPencil& p, Index level);

/// Characteristic values and bases of the strangeness analysis.
struct IndexData {
  bool hypothesis_satisfied = false;
  Index mu = 0;   ///< smallest level at which the rank conditions hold
  Index r = 0;    ///< rank of the full derivative-array Jacobian
  Index a = 0;    ///< number of (explicit + hidden) algebraic constraints
  Index d = 0;    ///< number of differential equations, d = n - a - nu
  Index nu = 0;   ///< number of trivial 0 = 0 equations
  Matrix Z2;      ///< (mu+1)n x a, orthonormal, Z2^T M = 0, rank(Z2^T N) = a
  Matrix T2;      ///< (n+m) x (n+m-a), orthonormal kernel of Z2^T N
  Matrix Z1;      ///< n x d, orthonormal, rank(Z1^T Eb T2) = d
  Matrix constraints;     ///< a x (n+m), orthonormal rows spanning all constraints
  Matrix explicit_rows;   ///< orthonormal rows of the level-0 algebraic part
  Matrix A2;      ///< constraint rows carrying input coefficients (x and u columns)
  Matrix A3;      ///< hidden input-free constraints, x columns only
  bool uode_rank_full = false;    ///< [E1^; A2^; A3^] has full row rank
  bool uode_rank_dyn_full = false;///< [E1^; A2^] has full row rank
  double tol = 0.0;
};

/// Smallest mu <= mu_max satisfying the rank conditions of the strangeness
/// hypothesis for a linear constant-coefficient behavior pencil. When no
/// level qualifies, the data of the last level is returned with
/// hypothesis_satisfied = false (reported, not thrown).
IndexData strangeness_analysis(const BehaviorPencil& p, Index mu_max = 3,
                               double tol = kRankTol);

/// Differentiation-index <= 1 test through the kernel decomposition of E:
/// either E is pointwise invertible or the block L22 Q22 built from the
/// singular vectors of E is, at every grid point. E must have constant rank
/// across the grid.
bool check_index_le_one(const PHDAESystem& sys, double tol = 1e-9,
                        Index grid_points = 33);

}  // namespace phdae
