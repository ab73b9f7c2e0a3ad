#include "phdae/sim.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phdae/linalg.hpp"

namespace phdae {

InputSignal InputSignal::zero(Index m) {
  InputSignal s;
  s.dim_ = m;
  s.coeffs_ = {Vector::Zero(m)};
  return s;
}

InputSignal InputSignal::polynomial(std::vector<Vector> coeffs) {
  if (coeffs.empty()) throw ShapeError("InputSignal: empty coefficient list");
  InputSignal s;
  s.dim_ = coeffs.front().size();
  for (const Vector& c : coeffs) {
    if (c.size() != s.dim_) throw ShapeError("InputSignal: coefficient sizes differ");
  }
  s.coeffs_ = std::move(coeffs);
  return s;
}

InputSignal InputSignal::sampled(std::vector<double> times, std::vector<Vector> values) {
  if (times.size() != values.size() || times.size() < 2) {
    throw ShapeError("InputSignal: need matching times/values with >= 2 samples");
  }
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    if (!(times[i] < times[i + 1])) {
      throw ShapeError("InputSignal: sample times must increase strictly");
    }
  }
  InputSignal s;
  s.sampled_mode_ = true;
  s.dim_ = values.front().size();
  for (const Vector& v : values) {
    if (v.size() != s.dim_) throw ShapeError("InputSignal: sample sizes differ");
  }
  s.times_ = std::move(times);
  s.values_ = std::move(values);
  return s;
}

Vector InputSignal::operator()(double t) const {
  if (!sampled_mode_) {
    Vector acc = coeffs_.back();
    for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) {
      acc = *it + t * acc;
    }
    return acc;
  }
  if (t <= times_.front()) return values_.front();
  if (t >= times_.back()) return values_.back();
  const auto hi = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t i = static_cast<std::size_t>(hi - times_.begin());
  const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
  return (1.0 - w) * values_[i - 1] + w * values_[i];
}

namespace {

void check_or_project_initial_state(const PHDAESystem& sys, const InputSignal& u,
                                    Vector& x0, const IntegrateOptions& opts,
                                    double t_start) {
  const Matrix e0 = sys.E(t_start);
  const Matrix ze = left_nullspace(e0);
  if (ze.cols() == 0) return;  // no algebraic part

  const Matrix a0 = sys.a_matrix(t_start);
  const auto residual = [&](const Vector& x) -> Vector {
    Vector r = ze.transpose() * (a0 * x);
    if (sys.m > 0) r += ze.transpose() * (sys.b_matrix(t_start) * u(t_start));
    return r;
  };

  Vector res = residual(x0);
  const double scale = 1.0 + x0.norm();
  if (res.norm() <= opts.consistency_tol * scale) return;

  if (!opts.project_initial_state) {
    std::ostringstream msg;
    msg << "integrate: initial state violates the algebraic consistency condition "
        << "(residual " << res.norm() << " > tol " << opts.consistency_tol * scale
        << "); pass the projection option or supply consistent data";
    throw NumericalError(msg.str());
  }

  // Least-squares correction of the kernel components of x0.
  const Matrix vk = nullspace(e0);
  const Matrix sys_mat = ze.transpose() * a0 * vk;
  const Eigen::ColPivHouseholderQR<Matrix> qr(sys_mat);
  if (qr.rank() < vk.cols()) {
    throw NumericalError("integrate: cannot project the initial state, the "
                         "algebraic block is rank deficient (index > 1?)");
  }
  x0 += vk * qr.solve(-res);
  res = residual(x0);
  if (res.norm() > opts.consistency_tol * (1.0 + x0.norm())) {
    throw NumericalError("integrate: consistency projection did not converge");
  }
}

}  // namespace

Trajectory integrate(const PHDAESystem& sys, const InputSignal& u, Vector x0,
                     const std::vector<double>& grid, const IntegrateOptions& opts) {
  if (grid.size() < 2) throw ShapeError("integrate: grid needs at least 2 points");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i] < grid[i + 1])) {
      throw ShapeError("integrate: grid must increase strictly");
    }
  }
  if (x0.size() != sys.n) throw ShapeError("integrate: x0 has wrong dimension");
  if (u.dim() != sys.m) throw ShapeError("integrate: input dimension mismatch");

  check_or_project_initial_state(sys, u, x0, opts, grid.front());

  const bool constant = sys.is_constant();
  bool uniform = true;
  const double h0 = grid[1] - grid[0];
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (std::abs((grid[i + 1] - grid[i]) - h0) > 1e-12 * std::max(1.0, std::abs(h0))) {
      uniform = false;
      break;
    }
  }

  const auto stage = [&](double h, double ts) -> std::pair<Matrix, Matrix> {
    // Returns (stage matrix, companion matrix applied to x_k).
    if (opts.method == IntegrationMethod::ImplicitMidpoint) {
      const Matrix e = sys.E(ts);
      const Matrix a = sys.a_matrix(ts);
      return {e - 0.5 * h * a, e + 0.5 * h * a};
    }
    const Matrix e = sys.E(ts);
    return {e - h * sys.a_matrix(ts), e};
  };

  Trajectory traj;
  const std::size_t count = grid.size();
  traj.times = grid;
  traj.states.reserve(count);
  traj.outputs.reserve(count);
  traj.inputs.reserve(count);
  traj.hamiltonian.reserve(count);

  Eigen::PartialPivLU<Matrix> lu;
  Matrix companion;
  bool factored = false;
  Vector x = x0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = grid[k];
    const Vector ut = u(t);
    traj.states.push_back(x);
    traj.inputs.push_back(ut);
    Vector y = sys.c_matrix(t) * x;
    if (sys.m > 0) y += sys.d_matrix(t) * ut;
    traj.outputs.push_back(y);
    traj.hamiltonian.push_back(sys.hamiltonian(x, t));
    if (k + 1 == count) break;

    const double h = grid[k + 1] - grid[k];
    const double ts = opts.method == IntegrationMethod::ImplicitMidpoint
                          ? t + 0.5 * h
                          : grid[k + 1];
    if (!factored || !constant || !uniform) {
      auto [mstage, comp] = stage(h, ts);
      lu.compute(mstage);
      companion = std::move(comp);
      factored = true;
    }
    Vector rhs = companion * x;
    if (sys.m > 0) rhs += h * (sys.b_matrix(ts) * u(ts));
    const Vector xn = lu.solve(rhs);
    if (!xn.allFinite()) {
      throw NumericalError("integrate: singular stage matrix (step too large or "
                           "structure violated)");
    }
    x = xn;
  }
  return traj;
}

Trajectory integrate(const PHDAESystem& sys, const InputSignal& u, Vector x0,
                     Index steps, const IntegrateOptions& opts) {
  if (steps < 1) throw ShapeError("integrate: steps must be >= 1");
  return integrate(sys, u, std::move(x0), sys.grid(steps + 1), opts);
}

EnergyReport energy_audit(const Trajectory& traj, const PHDAESystem& sys,
                          const InputSignal* u) {
  if (traj.times.size() < 2) throw ShapeError("energy_audit: trajectory too short");
  EnergyReport rep;
  rep.balance_residuals.reserve(traj.times.size() - 1);

  double signed_cumulative = 0.0;
  for (std::size_t k = 0; k + 1 < traj.times.size(); ++k) {
    const double h = traj.times[k + 1] - traj.times[k];
    const double tm = traj.times[k] + 0.5 * h;
    const Vector xm = 0.5 * (traj.states[k] + traj.states[k + 1]);
    const Vector um = u != nullptr ? (*u)(tm)
                                   : Vector(0.5 * (traj.inputs[k] + traj.inputs[k + 1]));
    Vector ym = sys.c_matrix(tm) * xm;
    if (sys.m > 0) ym += sys.d_matrix(tm) * um;

    Vector z(sys.n + sys.m);
    z.head(sys.n) = xm;
    z.tail(sys.m) = um;
    const double supply_rate = sys.m > 0 ? um.dot(ym) : 0.0;
    const double diss_rate = z.dot(sys.w_matrix(tm) * z);
    const double dh = traj.hamiltonian[k + 1] - traj.hamiltonian[k];
    const double r = dh - h * (supply_rate - diss_rate);
    rep.balance_residuals.push_back(r);
    rep.max_balance_residual = std::max(rep.max_balance_residual, std::abs(r));
    signed_cumulative += r;

    const double sk = sys.m > 0 ? traj.inputs[k].dot(traj.outputs[k]) : 0.0;
    const double sk1 = sys.m > 0 ? traj.inputs[k + 1].dot(traj.outputs[k + 1]) : 0.0;
    rep.cumulative_supply += 0.5 * h * (sk + sk1);
  }
  rep.cumulative_balance_residual = std::abs(signed_cumulative);
  rep.dissipation_margin =
      rep.cumulative_supply - (traj.hamiltonian.back() - traj.hamiltonian.front());
  rep.tol = 1e-8 * (1.0 + std::abs(traj.hamiltonian.front()));
  rep.violated = rep.dissipation_margin < -rep.tol;
  return rep;
}

std::vector<double> reconstruct_derivative(const std::vector<double>& times,
                                           const std::vector<double>& values) {
  const std::size_t n = times.size();
  if (n < 3 || values.size() != n) {
    throw ShapeError("reconstruct_derivative: need >= 3 matching samples");
  }
  std::vector<double> d(n);
  const auto three_point = [&](std::size_t i0, std::size_t i1, std::size_t i2,
                               double t) {
    // Derivative of the quadratic through the three samples, evaluated at t.
    const double t0 = times[i0], t1 = times[i1], t2 = times[i2];
    const double w0 = (2.0 * t - t1 - t2) / ((t0 - t1) * (t0 - t2));
    const double w1 = (2.0 * t - t0 - t2) / ((t1 - t0) * (t1 - t2));
    const double w2 = (2.0 * t - t0 - t1) / ((t2 - t0) * (t2 - t1));
    return w0 * values[i0] + w1 * values[i1] + w2 * values[i2];
  };
  d[0] = three_point(0, 1, 2, times[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = three_point(i - 1, i, i + 1, times[i]);
  d[n - 1] = three_point(n - 3, n - 2, n - 1, times[n - 1]);
  return d;
}

std::vector<Vector> reconstruct_derivative(const std::vector<double>& times,
                                           const std::vector<Vector>& values) {
  const std::size_t n = times.size();
  if (n < 3 || values.size() != n) {
    throw ShapeError("reconstruct_derivative: need >= 3 matching samples");
  }
  const Index dim = values.front().size();
  std::vector<Vector> out(n, Vector::Zero(dim));
  std::vector<double> comp(n);
  for (Index c = 0; c < dim; ++c) {
    for (std::size_t i = 0; i < n; ++i) comp[i] = values[i](c);
    const std::vector<double> dc = reconstruct_derivative(times, comp);
    for (std::size_t i = 0; i < n; ++i) out[i](c) = dc[i];
  }
  return out;
}

std::vector<double> reconstruct_derivative(const Trajectory& traj, Index component) {
  if (traj.states.empty() || component < 0 || component >= traj.states.front().size()) {
    throw ShapeError("reconstruct_derivative: component out of range");
  }
  std::vector<double> comp(traj.times.size());
  for (std::size_t i = 0; i < comp.size(); ++i) comp[i] = traj.states[i](component);
  return reconstruct_derivative(traj.times, comp);
}

}  // namespace phdae
