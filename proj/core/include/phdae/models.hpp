#pragma once

#include <string>
#include <vector>

#include "phdae/system.hpp"

namespace phdae {
namespace models {

/// RLC network in modified-nodal form. Incidence matrices map edge quantities
/// to (reduced) node equations; C, L, Rr are SPD edge parameter matrices and
/// Gv must have full column rank. State [V; I_l; I_v], no ports.
struct RlcParams {
  Matrix Gc, Gr, Gl, Gv;
  Matrix C, L, Rr;
  double t0 = 0.0, tf = 1.0;
};
PHDAESystem rlc(const RlcParams& p);

/// Space-discretized gas network: E = blkdiag(M1, M2, 0), constraint matrix
/// N~ and stacked [G~; N~] of full row rank, damping D~ SPD.
struct GasParams {
  Matrix M1, M2;
  Matrix G, N;   // G~: n1 x n2, N~: n3 x n2
  Matrix D;      // n2 x n2
  Matrix B2;     // n2 x m
  double t0 = 0.0, tf = 1.0;
};
PHDAESystem gas_network(const GasParams& p);

/// Linearized constrained manipulator in first-order form, state
/// [dp'; dp; dlambda] with E = blkdiag(M~, I, 0) and Q = blkdiag(I, S~, I).
struct ManipulatorParams {
  Matrix M, S;   // SPD, np x np
  Matrix D;      // PSD, np x np
  Matrix G;      // nc x np, full row rank
  Matrix B1;     // np x m
  double t0 = 0.0, tf = 1.0;
};
PHDAESystem manipulator_linearized(const ManipulatorParams& p);

/// Second-order acoustic model M p'' + D p' + K p = B1 u in first-order form,
/// state [p'; p] with E = blkdiag(M, I) and Q = blkdiag(I, K). A semidefinite
/// mass matrix (zeroed small masses) produces a higher-index system.
struct AcousticParams {
  Matrix M;          // symmetric PSD
  Matrix D;          // symmetric PSD
  Matrix stiffness;  // SPD
  Matrix B1;
  double t0 = 0.0, tf = 1.0;
};
PHDAESystem acoustic(const AcousticParams& p);

RlcParams rlc_preset();
RlcParams rlc_core_preset();  ///< no voltage sources: index <= 1
GasParams gas_preset();       ///< n1 = 2, n2 = 3, n3 = 1, one input
ManipulatorParams manipulator_preset();
AcousticParams acoustic_preset();              ///< SPD mass: index <= 1
AcousticParams acoustic_constrained_preset();  ///< singular mass: higher index

/// Conservative oscillator (E = Q = I, skew J, no dissipation, no ports).
PHDAESystem oscillator_preset();

std::vector<std::string> preset_names();
PHDAESystem preset(const std::string& name);

}  // namespace models
}  // namespace phdae
