#pragma once

#include "phdae/system.hpp"

namespace phdae {

enum class IntegrationMethod { ImplicitMidpoint, ImplicitEuler };

/// Input signal u(t): identically zero, vector polynomial, or samples with
/// linear interpolation.
class InputSignal {
 public:
  static InputSignal zero(Index m);
  static InputSignal polynomial(std::vector<Vector> coeffs);
  static InputSignal sampled(std::vector<double> times, std::vector<Vector> values);

  Vector operator()(double t) const;
  Index dim() const { return dim_; }

  bool is_sampled() const { return sampled_mode_; }
  const std::vector<Vector>& poly_coefficients() const { return coeffs_; }
  const std::vector<double>& sample_times() const { return times_; }
  const std::vector<Vector>& sample_values() const { return values_; }

 private:
  InputSignal() = default;
  Index dim_ = 0;
  std::vector<Vector> coeffs_;     // polynomial mode
  std::vector<double> times_;     // sampled mode
  std::vector<Vector> values_;
  bool sampled_mode_ = false;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> outputs;
  std::vector<Vector> inputs;
  std::vector<double> hamiltonian;
};

struct IntegrateOptions {
  IntegrationMethod method = IntegrationMethod::ImplicitMidpoint;
  /// Project the algebraic part of x0 onto the constraint instead of failing.
  bool project_initial_state = false;
  double consistency_tol = 1e-8;
};

/// One-step implicit integration of an index <= 1 pHDAE (or a reduced ODE).
/// The linear stage equations are solved by dense LU; outputs and the
/// Hamiltonian are evaluated on the grid. The initial state must satisfy the
/// algebraic constraints at t0 up to consistency_tol, or be projected.
Trajectory integrate(const PHDAESystem& sys, const InputSignal& u, Vector x0,
                     const std::vector<double>& grid,
                     const IntegrateOptions& opts = {});

/// Uniform grid convenience overload over [t0, tf].
Trajectory integrate(const PHDAESystem& sys, const InputSignal& u, Vector x0,
                     Index steps, const IntegrateOptions& opts = {});

struct EnergyReport {
  std::vector<double> balance_residuals;  ///< per-step discrete energy-balance residual
  double max_balance_residual = 0.0;
  double cumulative_balance_residual = 0.0;
  double cumulative_supply = 0.0;    ///< trapezoidal integral of u^T y
  double dissipation_margin = 0.0;   ///< supply - (H(tf) - H(t0))
  double tol = 0.0;
  bool violated = false;             ///< dissipation_margin < -tol
};

/// Per-step residual of the discrete energy balance
/// r_k = dH_k - h (u^T y - [x;u]^T W [x;u]) at the step midpoint, plus the
/// cumulative supply and the dissipation margin. When the input signal is
/// passed, midpoints use u(t_mid) exactly; otherwise node averages.
EnergyReport energy_audit(const Trajectory& traj, const PHDAESystem& sys,
                          const InputSignal* u = nullptr);

/// Second-order finite differences on a (possibly nonuniform) grid with
/// one-sided stencils at the ends. Requires at least 3 points.
std::vector<double> reconstruct_derivative(const std::vector<double>& times,
                                           const std::vector<double>& values);
std::vector<Vector> reconstruct_derivative(const std::vector<double>& times,
                                           const std::vector<Vector>& values);
/// Derivative of one state component of a trajectory.
std::vector<double> reconstruct_derivative(const Trajectory& traj, Index component);

}  // namespace phdae
