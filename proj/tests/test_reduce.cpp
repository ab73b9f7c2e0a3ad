#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "phdae/models.hpp"
#include "phdae/reduce.hpp"
#include "phdae/sim.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace phdae;

namespace {

PHDAESystem two_by_two_phdae() {
  const Matrix e = (Matrix(2, 2) << 1, 0, 0, 0).finished();
  const Matrix j = (Matrix(2, 2) << 0, 1, -1, 0).finished();
  const Matrix r = (Matrix(2, 2) << 0, 0, 0, 1).finished();
  return PHDAESystem::pencil(MatFun::constant(e), MatFun::constant(j),
                             MatFun::constant(r), 0.0, 1.0);
}

}  // namespace

TEST_CASE("invertible E gives an empty algebraic block") {
  const PHDAESystem sys = models::preset("oscillator");
  const CanonicalIndexOne c = index_one_canonical(sys);
  CHECK(c.n2 == 0);
  CHECK(c.n1 == 4);
  CHECK(verify_structure(c.system).passed);
  CHECK(c.structural_zero_residual <= 1e-12);
}

TEST_CASE("2x2 canonical blocks match the hand computation") {
  const PHDAESystem sys = two_by_two_phdae();
  const CanonicalIndexOne c = index_one_canonical(sys);
  REQUIRE(c.n1 == 1);
  REQUIRE(c.n2 == 1);
  // Hand algebra: E11 = 1, L22 = -1, Q22 = 1, and the (1,2) block of
  // (J - R) Q - E K vanishes after the shear.
  CHECK(c.E11()(0.0)(0, 0) == doctest::Approx(1.0));
  CHECK(c.L22()(0.0)(0, 0) == doctest::Approx(-1.0));
  CHECK(c.Q22()(0.0)(0, 0) == doctest::Approx(1.0));
  CHECK(c.structural_zero_residual <= 1e-12);
  CHECK(c.q_offdiag_residual <= 1e-12);
  CHECK(verify_structure(c.system).passed);

  // Reduced dynamics: x1' = -x1 (substituting x2 = -x1).
  const ReducedSystem red = reduce_index_one(c);
  const Matrix a_red = red.ode.a_matrix(0.0);
  CHECK(a_red(0, 0) == doctest::Approx(-1.0));
  CHECK(red.x2_from_x1(0.0)(0, 0) == doctest::Approx(-1.0));
}

TEST_CASE("canonical form refuses higher-index inputs") {
  CHECK_THROWS_AS(index_one_canonical(models::preset("gas")), NumericalError);
}

TEST_CASE("constructively generated index-one systems canonicalize cleanly") {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 8; ++trial) {
    const auto pair = testgen::random_index_one(rng, 3, 2, 2);
    REQUIRE(verify_structure(pair.scrambled).passed);
    REQUIRE(check_index_le_one(pair.scrambled));

    const CanonicalIndexOne c = index_one_canonical(pair.scrambled);
    CHECK(c.n1 == 3);
    CHECK(c.n2 == 2);
    CHECK(c.structural_zero_residual <= 1e-10);
    CHECK(c.q_offdiag_residual <= 1e-10);
    CHECK(verify_structure(c.system, 33, 1e-9).passed);

    // Q11^T E11 symmetric (eq of the canonical structure).
    const Matrix h = c.Q11()(0.0).transpose() * c.E11()(0.0);
    CHECK((h - h.transpose()).norm() < 1e-10);
  }
}

TEST_CASE("hat coefficients collapse when the algebraic block has no ports") {
  std::mt19937 rng(23);
  auto pair = testgen::random_index_one(rng, 3, 2, 2);
  // Zero the port rows of the algebraic block in canonical coordinates, then
  // rebuild the scrambled system.
  PHDAESystem canon = pair.canonical;
  std::vector<Matrix> bc = canon.B.coefficients();
  bc[0].bottomRows(2).setZero();
  std::vector<Matrix> pc = canon.P.coefficients();
  pc[0].bottomRows(2).setZero();
  canon = PHDAESystem::assemble(canon.E, canon.Q, canon.J, canon.R, canon.K,
                                MatFun(bc), MatFun(pc), canon.S, canon.N, canon.t0,
                                canon.tf);
  const CanonicalIndexOne c = index_one_canonical(canon);
  const ReducedSystem red = reduce_index_one(c);
  // B2 = P2 = 0 forces B^ = B1, P^ = P1, S^ = S, N^ = N.
  CHECK((red.ode.B(0.0) - c.B1()(0.0)).norm() < 1e-11);
  CHECK((red.ode.P(0.0) - c.P1()(0.0)).norm() < 1e-11);
  CHECK((red.ode.S(0.0) - canon.S(0.0)).norm() < 1e-11);
  CHECK((red.ode.N(0.0) - canon.N(0.0)).norm() < 1e-11);
}

TEST_CASE("reduced coefficients keep exact symmetry and the W congruence") {
  std::mt19937 rng(25);
  for (int trial = 0; trial < 6; ++trial) {
    const auto pair = testgen::random_index_one(rng, 3, 2, 2);
    const CanonicalIndexOne c = index_one_canonical(pair.scrambled);
    const ReducedSystem red = reduce_index_one(c);
    const Index m = 2;

    const Matrix shat = red.ode.S(0.0);
    const Matrix nhat = red.ode.N(0.0);
    CHECK((shat - shat.transpose()).norm() == 0.0);
    CHECK((nhat + nhat.transpose()).norm() == 0.0);

    // S^ + N^ = S + N - (B2 + P2)^T L22^{-1} (B2 - P2).
    const Matrix l22 = c.L22()(0.0);
    const Matrix b2 = c.B2()(0.0), p2 = c.P2()(0.0);
    const Matrix expected = c.system.S(0.0) + c.system.N(0.0) -
                            (b2 + p2).transpose() * l22.partialPivLu().solve(b2 - p2);
    CHECK((shat + nhat - expected).norm() < 1e-12);

    // W^ = X^T W X with X = [[I, 0], [x2_from_x1, x2_from_u], [0, I]].
    Matrix x(c.n1 + c.n2 + m, c.n1 + m);
    x.setZero();
    x.topLeftCorner(c.n1, c.n1).setIdentity();
    x.block(c.n1, 0, c.n2, c.n1) = red.x2_from_x1(0.0);
    x.block(c.n1, c.n1, c.n2, m) = red.x2_from_u(0.0);
    x.bottomRightCorner(m, m).setIdentity();
    const Matrix w_full = c.system.w_matrix(0.0);
    const Matrix w_hat = red.ode.w_matrix(0.0);
    CHECK((w_hat - x.transpose() * w_full * x).norm() < 1e-10);
    CHECK(min_eigenvalue_sym(w_hat) >= -1e-10 * (1.0 + w_hat.norm()));
    CHECK(verify_structure(red.ode).passed);
  }
}

TEST_CASE("portless reduction preserves the Hamiltonian on consistent states") {
  std::mt19937 rng(27);
  const auto pair = testgen::random_index_one(rng, 3, 2, 0);
  const CanonicalIndexOne c = index_one_canonical(pair.scrambled);
  const ReducedSystem red = reduce_index_one(c);
  CHECK(red.ode.m == 0);
  std::normal_distribution<double> dist;
  for (int k = 0; k < 5; ++k) {
    Vector x1(3);
    for (Index i = 0; i < 3; ++i) x1(i) = dist(rng);
    const Vector x_full = red.lift(x1, Vector::Zero(0), 0.0);
    CHECK(red.consistency_residual(x_full, Vector::Zero(0), 0.0) < 1e-10);
    const double h_full = pair.scrambled.hamiltonian(x_full, 0.0);
    const double h_red = red.ode.hamiltonian(x1, 0.0);
    CHECK(h_red == doctest::Approx(h_full).epsilon(1e-9));
  }
}

TEST_CASE("dual simulation: full DAE and reduced ODE agree on x1") {
  std::mt19937 rng(29);
  const auto pair = testgen::random_index_one(rng, 3, 2, 2);
  const CanonicalIndexOne c = index_one_canonical(pair.scrambled);
  const ReducedSystem red = reduce_index_one(c);

  const InputSignal u = InputSignal::polynomial(
      {0.3 * Vector::Ones(2), Vector(-0.2 * Vector::Ones(2))});
  Vector x1_0(3);
  x1_0 << 0.7, -0.4, 0.2;
  const Vector x0_full = red.lift(x1_0, u(0.0), 0.0);
  REQUIRE(red.consistency_residual(x0_full, u(0.0), 0.0) < 1e-9);

  const Index steps = 1000;
  const Trajectory full = integrate(pair.scrambled, u, x0_full, steps);
  const Trajectory reduced = integrate(red.ode, u, x1_0, steps);
  double worst = 0.0;
  for (std::size_t k = 0; k < full.times.size(); k += 50) {
    const Vector x1_full = red.split_x1(full.states[k], full.times[k]);
    worst = std::max(worst, (x1_full - reduced.states[k]).norm());
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("regularization is the identity when no hidden constraints exist") {
  const PHDAESystem sys = models::preset("oscillator");
  const IndexData idx = strangeness_analysis(BehaviorPencil::from_system(sys));
  REQUIRE(idx.A3.rows() == 0);
  const RegularizedSystem reg = regularize_high_index(sys, idx);
  CHECK(reg.identity);
  CHECK(reg.pinned == 0);
  CHECK((reg.subsystem.E(0.0) - sys.E(0.0)).norm() == 0.0);
}

TEST_CASE("2x2 pencil regularization pins the full constraint set") {
  const PHDAESystem sys = two_by_two_phdae();
  // Use the pure pencil with R = 0 as in the skew embedding.
  const Matrix e = (Matrix(2, 2) << 1, 0, 0, 0).finished();
  const Matrix j = (Matrix(2, 2) << 0, 1, -1, 0).finished();
  const PHDAESystem pencil = PHDAESystem::pencil(
      MatFun::constant(e), MatFun::constant(j), MatFun::zero(2, 2), 0.0, 1.0);
  REQUIRE(verify_structure(pencil).passed);

  const IndexData idx = strangeness_analysis(BehaviorPencil::from_system(pencil));
  REQUIRE(idx.mu == 1);
  REQUIRE(idx.A3.rows() == 1);
  const RegularizedSystem reg = regularize_high_index(pencil, idx);
  CHECK(reg.pinned == 1);
  CHECK(reg.subsystem.n == 1);
  CHECK(verify_structure(reg.subsystem).passed);
  CHECK(check_index_le_one(reg.subsystem));

  // Brute-force solution-set oracle: the original pencil admits only x = 0.
  const Matrix consistent = oracle::consistent_state_space(e, j, 2);
  CHECK(consistent.cols() == 0);
  // The overdetermined system plus the pin reproduces that: append the pin
  // rows as algebraic equations and compute the consistent set again.
  const Index n = 2, a3 = reg.pinned;
  Matrix e_aug(n + a3, n);
  e_aug.topRows(n) = reg.overdetermined.E(0.0);
  e_aug.bottomRows(a3).setZero();
  Matrix a_aug(n + a3, n);
  a_aug.topRows(n) = reg.overdetermined.a_matrix(0.0);
  a_aug.bottomRows(a3) = Matrix::Identity(n, n).bottomRows(a3);
  const Matrix consistent_reg = oracle::consistent_state_space(e_aug, a_aug, 2);
  CHECK(consistent_reg.cols() == 0);
}

TEST_CASE("regularized gas subsystem verifies, is index one, and matches the split") {
  const PHDAESystem gas = models::preset("gas");
  const auto params = models::gas_preset();
  const IndexData idx =
      strangeness_analysis(BehaviorPencil::from_system(gas, /*zero_input=*/true));
  REQUIRE(idx.mu == 1);
  REQUIRE(idx.A3.rows() == 1);

  const RegularizedSystem reg = regularize_high_index(gas, idx);
  CHECK(reg.pinned == 1);
  CHECK(reg.subsystem.n == 5);
  CHECK(verify_structure(reg.subsystem, 33, 1e-9).passed);
  CHECK(check_index_le_one(reg.subsystem));

  // Consistent initial data for u = 0: flux in ker(N~), multiplier from the
  // differentiated constraint.
  const Matrix nt = params.N;
  const Matrix kerN = nullspace(nt);
  Vector x1(2);
  x1 << 0.8, -0.5;
  const Vector x2 = kerN * Vector::Ones(kerN.cols());
  const Matrix nmn = nt * params.M2.llt().solve(nt.transpose());
  const Vector lam = nmn.partialPivLu().solve(
      nt * params.M2.llt().solve(params.G.transpose() * x1 - params.D * x2));
  Vector x0(6);
  x0 << x1, x2, lam;

  const Vector xnew0 = reg.V.partialPivLu().solve(x0);
  CHECK(std::abs(xnew0(5)) < 1e-9);  // pinned coordinate vanishes on consistent data

  // Simulate the subsystem, lift with x3 = 0, substitute into the original.
  const InputSignal u0 = InputSignal::zero(1);
  const Trajectory sub = integrate(reg.subsystem, u0, xnew0.head(5), 500);
  std::vector<Vector> lifted(sub.times.size());
  for (std::size_t k = 0; k < sub.times.size(); ++k) {
    Vector xn(6);
    xn << sub.states[k], 0.0;
    lifted[k] = reg.V * xn;
  }
  const std::vector<Vector> xdot = reconstruct_derivative(sub.times, lifted);
  double worst = 0.0;
  const Matrix e_orig = gas.E(0.0);
  const Matrix a_orig = gas.a_matrix(0.0);
  for (std::size_t k = 0; k < sub.times.size(); ++k) {
    worst = std::max(worst, (e_orig * xdot[k] - a_orig * lifted[k]).norm());
  }
  CHECK(worst <= 1e-6 * (1.0 + e_orig.norm()));

  // Behavioral match with the structure-exploiting split route.
  const GasSplit split = gas_reduction(gas, 2, 3, 1);
  Vector z0(4);
  z0 << x1, (split.UN * x2).head(2);
  const Trajectory ode = integrate(split.reduced_ode, u0, z0, 500);
  double worst_h = 0.0;
  for (std::size_t k = 0; k < ode.times.size(); k += 25) {
    worst_h = std::max(worst_h,
                       std::abs(ode.hamiltonian[k] - sub.hamiltonian[k]));
  }
  CHECK(worst_h <= 1e-8);
}

TEST_CASE("constrained acoustic model regularizes") {
  const PHDAESystem sys = models::preset("acoustic_constrained");
  REQUIRE_FALSE(check_index_le_one(sys));
  const IndexData idx =
      strangeness_analysis(BehaviorPencil::from_system(sys, /*zero_input=*/true));
  REQUIRE(idx.mu == 1);
  REQUIRE(idx.A3.rows() > 0);
  const RegularizedSystem reg = regularize_high_index(sys, idx);
  CHECK(verify_structure(reg.subsystem, 33, 1e-9).passed);
  CHECK(check_index_le_one(reg.subsystem));
}

TEST_CASE("rank-assumption violations are reported with singular values") {
  // Hidden constraints acting on range directions only: A32 = 0.
  const PHDAESystem gas = models::preset("gas");
  IndexData idx =
      strangeness_analysis(BehaviorPencil::from_system(gas, /*zero_input=*/true));
  idx.A3 = Matrix::Zero(1, 6);
  idx.A3(0, 2) = 1.0;  // pins a flux direction, not a kernel direction
  CHECK_THROWS_WITH_AS(static_cast<void>(regularize_high_index(gas, idx)),
                       doctest::Contains("singular values"), NumericalError);
}

TEST_CASE("gas split: structure checks, dimensions, and Sigma") {
  const PHDAESystem gas = models::preset("gas");
  const GasSplit split = gas_reduction(gas, 2, 3, 1);
  CHECK(split.reduced_ode.n == 2 + (3 - 1));
  CHECK(verify_structure(split.reduced_ode).passed);
  CHECK(check_index_le_one(split.reduced_ode));
  // Sigma is diagonal by construction and invertible.
  CHECK(split.Sigma.rows() == 1);
  CHECK(split.Sigma(0, 0) > 0.0);
  // The reduced state dimension follows the SVD split count.
  CHECK(split.reduced_ode.n == split.n1 + (split.n2 - split.n3));
  // Structural misfits are rejected.
  CHECK_THROWS_AS(static_cast<void>(gas_reduction(models::preset("manipulator"), 3, 3, 2)),
                  ShapeError);
  CHECK_THROWS_AS(static_cast<void>(gas_reduction(gas, 3, 2, 1)), ShapeError);
}

TEST_CASE("gas split: zero data stays zero and consistency is enforced") {
  const PHDAESystem gas = models::preset("gas");
  const GasSplit split = gas_reduction(gas, 2, 3, 1);
  const InputSignal u0 = InputSignal::zero(1);
  const Trajectory ode =
      integrate(split.reduced_ode, u0, Vector::Zero(4), 200);
  for (std::size_t k = 0; k < ode.times.size(); k += 20) {
    CHECK(ode.states[k].norm() == 0.0);
    const Vector dx22 = split.dx22_from_state(ode.states[k].head(2),
                                              ode.states[k].tail(2), u0(0.0));
    const Vector lam = split.multiplier(ode.states[k].head(2), ode.states[k].tail(2),
                                        dx22, u0(0.0));
    CHECK(lam.norm() == 0.0);  // x3 stays identically zero
  }

  const auto [x23_res, lam_res] = split.consistency_residuals(Vector::Zero(6),
                                                              Vector::Zero(1));
  CHECK(x23_res == 0.0);
  CHECK(lam_res == 0.0);
  // A deliberately wrong multiplier is flagged.
  Vector bad = Vector::Zero(6);
  bad(5) = 1.0;
  const auto [x23_bad, lam_bad] = split.consistency_residuals(bad, Vector::Zero(1));
  CHECK(x23_bad == 0.0);
  CHECK(lam_bad > 0.5);
}

TEST_CASE("discontinuous B32 u is flagged as a multiplier jump") {
  const PHDAESystem gas = models::preset("gas");
  const GasSplit split = gas_reduction(gas, 2, 3, 1);
  std::vector<Vector> smooth{Vector::Constant(1, 0.2), Vector::Constant(1, 0.200001),
                             Vector::Constant(1, 0.200002)};
  CHECK_FALSE(split.multiplier_jump_flag(smooth));
  std::vector<Vector> jumping{Vector::Constant(1, 0.2), Vector::Constant(1, 1.2),
                              Vector::Constant(1, 1.2)};
  CHECK(split.multiplier_jump_flag(jumping));
}

TEST_CASE("multiplier recovery through reconstructed derivatives is second order") {
  const PHDAESystem gas = models::preset("gas");
  const GasSplit split = gas_reduction(gas, 2, 3, 1);
  const InputSignal u = InputSignal::polynomial(
      {Vector::Constant(1, 0.5), Vector::Constant(1, -0.3),
       Vector::Constant(1, 0.2)});
  Vector z0(4);
  z0 << 0.4, -0.7, 0.3, 0.1;

  const auto worst_residual = [&](Index steps) {
    const Trajectory ode = integrate(split.reduced_ode, u, z0, steps);
    std::vector<Vector> x22(ode.times.size());
    for (std::size_t k = 0; k < ode.times.size(); ++k) x22[k] = ode.states[k].tail(2);
    const std::vector<Vector> dx22 = reconstruct_derivative(ode.times, x22);
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < ode.times.size(); ++k) {
      const Vector x1 = ode.states[k].head(2);
      const Vector lam_fd = split.multiplier(x1, x22[k], dx22[k], ode.inputs[k]);
      const Vector lam_exact = split.multiplier(
          x1, x22[k], split.dx22_from_state(x1, x22[k], ode.inputs[k]),
          ode.inputs[k]);
      worst = std::max(worst, (lam_fd - lam_exact).norm());
    }
    return worst;
  };

  const double r1 = worst_residual(100);
  const double r2 = worst_residual(200);
  const double order = std::log2(r1 / r2);
  CHECK(order > 1.6);
  CHECK(order < 2.4);
}
