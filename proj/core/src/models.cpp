#include "phdae/models.hpp"

#include <Eigen/Dense>

#include "phdae/linalg.hpp"

namespace phdae {
namespace models {

namespace {

void require_spd(const Matrix& a, const char* name) {
  if (a.rows() != a.cols()) {
    throw ShapeError(std::string(name) + " must be square");
  }
  if (a.size() == 0) return;
  if ((a - a.transpose()).norm() > 1e-12 * (1.0 + a.norm())) {
    throw ShapeError(std::string(name) + " must be symmetric");
  }
  if (min_eigenvalue_sym(a) <= 0.0) {
    throw ShapeError(std::string(name) + " must be positive definite");
  }
}

void require_psd(const Matrix& a, const char* name) {
  if (a.rows() != a.cols()) {
    throw ShapeError(std::string(name) + " must be square");
  }
  if (a.size() == 0) return;
  if ((a - a.transpose()).norm() > 1e-12 * (1.0 + a.norm())) {
    throw ShapeError(std::string(name) + " must be symmetric");
  }
  if (min_eigenvalue_sym(a) < -1e-12 * (1.0 + a.norm())) {
    throw ShapeError(std::string(name) + " must be positive semidefinite");
  }
}

void require_full_column_rank(const Matrix& a, const char* name) {
  if (a.cols() > 0 && numerical_rank(a) != a.cols()) {
    throw ShapeError(std::string(name) + " must have full column rank");
  }
}

void require_full_row_rank(const Matrix& a, const char* name) {
  if (a.rows() > 0 && numerical_rank(a) != a.rows()) {
    throw ShapeError(std::string(name) + " must have full row rank");
  }
}

}  // namespace

PHDAESystem rlc(const RlcParams& p) {
  const Index nn = p.Gc.rows();  // reduced node count
  const Index nl = p.Gl.cols();
  const Index nv = p.Gv.cols();
  if (p.Gr.rows() != nn || p.Gl.rows() != nn || p.Gv.rows() != nn) {
    throw ShapeError("rlc: incidence matrices must share the node dimension");
  }
  require_spd(p.C, "rlc: C");
  require_spd(p.L, "rlc: L");
  require_spd(p.Rr, "rlc: Rr");
  if (p.C.rows() != p.Gc.cols()) throw ShapeError("rlc: C size mismatch with Gc");
  if (p.L.rows() != nl) throw ShapeError("rlc: L size mismatch with Gl");
  if (p.Rr.rows() != p.Gr.cols()) throw ShapeError("rlc: Rr size mismatch with Gr");
  require_full_column_rank(p.Gv, "rlc: Gv");

  const Index n = nn + nl + nv;
  Matrix e = Matrix::Zero(n, n);
  e.topLeftCorner(nn, nn) = p.Gc * p.C * p.Gc.transpose();
  e.block(nn, nn, nl, nl) = p.L;

  Matrix j = Matrix::Zero(n, n);
  j.block(0, nn, nn, nl) = -p.Gl;
  j.block(0, nn + nl, nn, nv) = -p.Gv;
  j.block(nn, 0, nl, nn) = p.Gl.transpose();
  j.block(nn + nl, 0, nv, nn) = p.Gv.transpose();

  Matrix r = Matrix::Zero(n, n);
  r.topLeftCorner(nn, nn) = p.Gr * p.Rr.llt().solve(p.Gr.transpose());

  return PHDAESystem::pencil(MatFun::constant(e), MatFun::constant(j),
                             MatFun::constant(r), p.t0, p.tf);
}

PHDAESystem gas_network(const GasParams& p) {
  const Index n1 = p.M1.rows();
  const Index n2 = p.M2.rows();
  const Index n3 = p.N.rows();
  const Index m = p.B2.cols();
  require_spd(p.M1, "gas: M1");
  require_spd(p.M2, "gas: M2");
  require_spd(p.D, "gas: D");
  if (p.G.rows() != n1 || p.G.cols() != n2) throw ShapeError("gas: G~ shape mismatch");
  if (p.N.cols() != n2) throw ShapeError("gas: N~ shape mismatch");
  if (p.D.rows() != n2) throw ShapeError("gas: D~ shape mismatch");
  if (p.B2.rows() != n2) throw ShapeError("gas: B~2 shape mismatch");
  require_full_row_rank(p.N, "gas: N~");
  Matrix gn(n1 + n3, n2);
  gn.topRows(n1) = p.G;
  gn.bottomRows(n3) = p.N;
  require_full_row_rank(gn, "gas: [G~; N~]");

  const Index n = n1 + n2 + n3;
  Matrix e = Matrix::Zero(n, n);
  e.topLeftCorner(n1, n1) = p.M1;
  e.block(n1, n1, n2, n2) = p.M2;

  Matrix j = Matrix::Zero(n, n);
  j.block(0, n1, n1, n2) = -p.G;
  j.block(n1, 0, n2, n1) = p.G.transpose();
  j.block(n1, n1 + n2, n2, n3) = p.N.transpose();
  j.block(n1 + n2, n1, n3, n2) = -p.N;

  Matrix r = Matrix::Zero(n, n);
  r.block(n1, n1, n2, n2) = p.D;

  Matrix b = Matrix::Zero(n, m);
  b.middleRows(n1, n2) = p.B2;

  return PHDAESystem::assemble(
      MatFun::constant(e), MatFun::identity(n), MatFun::constant(j),
      MatFun::constant(r), MatFun::zero(n, n), MatFun::constant(b),
      MatFun::zero(n, m), MatFun::zero(m, m), MatFun::zero(m, m), p.t0, p.tf);
}

PHDAESystem manipulator_linearized(const ManipulatorParams& p) {
  const Index np = p.M.rows();
  const Index nc = p.G.rows();
  const Index m = p.B1.cols();
  require_spd(p.M, "manipulator: M~");
  require_spd(p.S, "manipulator: S~");
  require_psd(p.D, "manipulator: D~");
  if (p.S.rows() != np || p.D.rows() != np) {
    throw ShapeError("manipulator: M~, S~, D~ must share the coordinate dimension");
  }
  if (p.G.cols() != np) throw ShapeError("manipulator: G~ shape mismatch");
  if (p.B1.rows() != np) throw ShapeError("manipulator: B~1 shape mismatch");
  require_full_row_rank(p.G, "manipulator: G~");

  const Index n = 2 * np + nc;
  Matrix e = Matrix::Zero(n, n);
  e.topLeftCorner(np, np) = p.M;
  e.block(np, np, np, np) = Matrix::Identity(np, np);

  Matrix q = Matrix::Identity(n, n);
  q.block(np, np, np, np) = p.S;

  Matrix j = Matrix::Zero(n, n);
  j.block(0, np, np, np) = -Matrix::Identity(np, np);
  j.block(np, 0, np, np) = Matrix::Identity(np, np);
  j.block(0, 2 * np, np, nc) = p.G.transpose();
  j.block(2 * np, 0, nc, np) = -p.G;

  Matrix r = Matrix::Zero(n, n);
  r.topLeftCorner(np, np) = p.D;

  Matrix b = Matrix::Zero(n, m);
  b.topRows(np) = p.B1;

  return PHDAESystem::assemble(
      MatFun::constant(e), MatFun::constant(q), MatFun::constant(j),
      MatFun::constant(r), MatFun::zero(n, n), MatFun::constant(b),
      MatFun::zero(n, m), MatFun::zero(m, m), MatFun::zero(m, m), p.t0, p.tf);
}

PHDAESystem acoustic(const AcousticParams& p) {
  const Index np = p.M.rows();
  const Index m = p.B1.cols();
  require_psd(p.M, "acoustic: M");
  require_psd(p.D, "acoustic: D");
  require_spd(p.stiffness, "acoustic: K");
  if (p.D.rows() != np || p.stiffness.rows() != np || p.B1.rows() != np) {
    throw ShapeError("acoustic: parameter dimensions must agree");
  }

  const Index n = 2 * np;
  Matrix e = Matrix::Zero(n, n);
  e.topLeftCorner(np, np) = p.M;
  e.bottomRightCorner(np, np) = Matrix::Identity(np, np);

  Matrix q = Matrix::Identity(n, n);
  q.bottomRightCorner(np, np) = p.stiffness;

  Matrix j = Matrix::Zero(n, n);
  j.topRightCorner(np, np) = -Matrix::Identity(np, np);
  j.bottomLeftCorner(np, np) = Matrix::Identity(np, np);

  Matrix r = Matrix::Zero(n, n);
  r.topLeftCorner(np, np) = p.D;

  Matrix b = Matrix::Zero(n, m);
  b.topRows(np) = p.B1;

  return PHDAESystem::assemble(
      MatFun::constant(e), MatFun::constant(q), MatFun::constant(j),
      MatFun::constant(r), MatFun::zero(n, n), MatFun::constant(b),
      MatFun::zero(n, m), MatFun::zero(m, m), MatFun::zero(m, m), p.t0, p.tf);
}

RlcParams rlc_preset() {
  // Two non-ground nodes, five edges: source 0->1, resistor 1->2,
  // inductor 2->0, and a capacitor from each node to ground.
  RlcParams p;
  p.Gc = Matrix::Identity(2, 2);
  p.Gr = (Matrix(2, 1) << 1, -1).finished();
  p.Gl = (Matrix(2, 1) << 0, 1).finished();
  p.Gv = (Matrix(2, 1) << -1, 0).finished();
  p.C = (Matrix(2, 2) << 1.0, 0, 0, 0.5).finished();
  p.L = (Matrix(1, 1) << 2.0).finished();
  p.Rr = (Matrix(1, 1) << 1.5).finished();
  return p;
}

RlcParams rlc_core_preset() {
  RlcParams p = rlc_preset();
  p.Gv = Matrix::Zero(2, 0);
  return p;
}

GasParams gas_preset() {
  GasParams p;
  p.M1 = (Matrix(2, 2) << 2.0, 0.3, 0.3, 1.5).finished();
  p.M2 = (Matrix(3, 3) << 1.8, 0.2, 0.1, 0.2, 1.2, 0.0, 0.1, 0.0, 1.0).finished();
  p.G = (Matrix(2, 3) << 1.0, 0.0, 0.5, 0.0, 1.0, -0.5).finished();
  p.N = (Matrix(1, 3) << 0.4, -0.3, 1.0).finished();
  p.D = (Matrix(3, 3) << 0.8, 0.1, 0.0, 0.1, 0.6, 0.1, 0.0, 0.1, 0.9).finished();
  p.B2 = (Matrix(3, 1) << 1.0, 0.5, -0.25).finished();
  return p;
}

ManipulatorParams manipulator_preset() {
  // Three Cartesian coordinates, two independent velocity constraints.
  ManipulatorParams p;
  p.M = (Matrix(3, 3) << 1.0, 0, 0, 0, 1.0, 0, 0, 0, 1.0).finished();
  p.S = (Matrix(3, 3) << 2.0, 0.2, 0, 0.2, 1.5, 0.1, 0, 0.1, 1.0).finished();
  p.D = (Matrix(3, 3) << 0.4, 0, 0, 0, 0.3, 0, 0, 0, 0.2).finished();
  p.G = (Matrix(2, 3) << 1.0, 0.0, 0.5, 0.0, 1.0, 1.0).finished();
  p.B1 = (Matrix(3, 1) << 1.0, 0.0, 0.0).finished();
  return p;
}

AcousticParams acoustic_preset() {
  AcousticParams p;
  p.M = (Matrix(3, 3) << 1.2, 0.1, 0, 0.1, 0.9, 0, 0, 0, 0.7).finished();
  p.D = (Matrix(3, 3) << 0.3, 0, 0, 0, 0.2, 0, 0, 0, 0.1).finished();
  p.stiffness =
      (Matrix(3, 3) << 2.0, -0.4, 0, -0.4, 1.6, -0.3, 0, -0.3, 1.2).finished();
  p.B1 = (Matrix(3, 1) << 1.0, 0.0, 0.5).finished();
  return p;
}

AcousticParams acoustic_constrained_preset() {
  AcousticParams p = acoustic_preset();
  // Zero out the smallest mass and its damping: one massless coordinate.
  p.M(2, 2) = 0.0;
  p.D(2, 2) = 0.0;
  return p;
}

PHDAESystem oscillator_preset() {
  Matrix j = Matrix::Zero(4, 4);
  j(0, 1) = 1.0;
  j(1, 0) = -1.0;
  j(2, 3) = 0.5;
  j(3, 2) = -0.5;
  return PHDAESystem::pencil(MatFun::identity(4), MatFun::constant(j),
                             MatFun::zero(4, 4), 0.0, 1.0);
}

std::vector<std::string> preset_names() {
  return {"rlc", "rlc_core", "gas", "manipulator", "acoustic",
          "acoustic_constrained", "oscillator"};
}

PHDAESystem preset(const std::string& name) {
  if (name == "rlc") return rlc(rlc_preset());
  if (name == "rlc_core") return rlc(rlc_core_preset());
  if (name == "gas") return gas_network(gas_preset());
  if (name == "manipulator") return manipulator_linearized(manipulator_preset());
  if (name == "acoustic") return acoustic(acoustic_preset());
  if (name == "acoustic_constrained") return acoustic(acoustic_constrained_preset());
  if (name == "oscillator") return oscillator_preset();
  throw ShapeError("unknown preset '" + name + "'");
}

}  // namespace models
}  // namespace phdae
