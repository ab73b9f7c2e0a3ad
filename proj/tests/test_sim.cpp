#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "phdae/linalg.hpp"
#include "phdae/models.hpp"
#include "phdae/sim.hpp"
#include "support/generators.hpp"

using namespace phdae;

TEST_CASE("implicit midpoint conserves the Hamiltonian of a conservative system") {
  const PHDAESystem sys = models::preset("oscillator");
  Vector x0(4);
  x0 << 1.0, 0.0, -0.5, 0.25;
  const Trajectory traj = integrate(sys, InputSignal::zero(0), x0, 1000);
  const double h0 = traj.hamiltonian.front();
  double drift = 0.0;
  for (double h : traj.hamiltonian) drift = std::max(drift, std::abs(h - h0));
  CHECK(drift <= 1e-12);
}

TEST_CASE("RLC decay: H is nonincreasing without input") {
  const PHDAESystem sys = models::preset("rlc_core");
  std::mt19937 rng(3);
  std::normal_distribution<double> dist;
  Vector x0(sys.n);
  for (Index i = 0; i < sys.n; ++i) x0(i) = dist(rng);
  const Trajectory traj = integrate(sys, InputSignal::zero(0), x0, 400);
  for (std::size_t k = 0; k + 1 < traj.hamiltonian.size(); ++k) {
    CHECK(traj.hamiltonian[k + 1] <= traj.hamiltonian[k] + 1e-13);
  }
}

TEST_CASE("scalar decay matches the closed form at h = 1e-3") {
  // x' = -x as a pHDAE: E = Q = 1, J = 0, R = 1.
  const PHDAESystem sys = PHDAESystem::pencil(
      MatFun::identity(1), MatFun::zero(1, 1),
      MatFun::constant(Matrix::Identity(1, 1)), 0.0, 1.0);
  const Trajectory traj =
      integrate(sys, InputSignal::zero(0), Vector::Ones(1), 1000);
  CHECK(std::abs(traj.states.back()(0) - std::exp(-1.0)) < 1e-6);
}

TEST_CASE("implicit midpoint is second order on the scalar oracle") {
  const PHDAESystem sys = PHDAESystem::pencil(
      MatFun::identity(1), MatFun::zero(1, 1),
      MatFun::constant(Matrix::Identity(1, 1)), 0.0, 1.0);
  const auto err = [&](Index steps) {
    const Trajectory t = integrate(sys, InputSignal::zero(0), Vector::Ones(1), steps);
    return std::abs(t.states.back()(0) - std::exp(-1.0));
  };
  const double order = std::log2(err(100) / err(200));
  CHECK(order == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("implicit Euler is available and first order") {
  const PHDAESystem sys = PHDAESystem::pencil(
      MatFun::identity(1), MatFun::zero(1, 1),
      MatFun::constant(Matrix::Identity(1, 1)), 0.0, 1.0);
  IntegrateOptions opts;
  opts.method = IntegrationMethod::ImplicitEuler;
  const auto err = [&](Index steps) {
    const Trajectory t =
        integrate(sys, InputSignal::zero(0), Vector::Ones(1), steps, opts);
    return std::abs(t.states.back()(0) - std::exp(-1.0));
  };
  const double order = std::log2(err(200) / err(400));
  CHECK(order == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("balance residual vanishes for constant conservative systems") {
  const PHDAESystem sys = models::preset("oscillator");
  Vector x0(4);
  x0 << 0.3, -0.2, 0.8, 0.0;
  const Trajectory traj = integrate(sys, InputSignal::zero(0), x0, 500);
  const EnergyReport rep = energy_audit(traj, sys);
  CHECK(rep.max_balance_residual <= 1e-14);
  CHECK(rep.dissipation_margin >= -rep.tol);
  CHECK_FALSE(rep.violated);
}

TEST_CASE("cumulative balance converges at second order for time-varying W = 0") {
  std::mt19937 rng(7);
  const PHDAESystem sys = testgen::time_varying_phdae(rng, 3, 1, /*conservative=*/true);
  REQUIRE(verify_structure(sys).passed);
  const InputSignal u = InputSignal::polynomial(
      {Vector::Constant(1, 0.4), Vector::Constant(1, -0.6)});
  Vector x0(3);
  x0 << 1.0, -0.3, 0.4;
  const auto cumulative = [&](Index steps) {
    const Trajectory t = integrate(sys, u, x0, steps);
    return energy_audit(t, sys, &u).cumulative_balance_residual;
  };
  const double c1 = cumulative(100);
  const double c2 = cumulative(200);
  const double c3 = cumulative(400);
  const double order1 = std::log2(c1 / c2);
  const double order2 = std::log2(c2 / c3);
  CHECK(order1 > 1.8);
  CHECK(order1 < 2.2);
  CHECK(order2 > 1.8);
  CHECK(order2 < 2.2);
}

TEST_CASE("dissipative time-varying runs keep the balance residual at O(h^2)") {
  std::mt19937 rng(9);
  const PHDAESystem sys = testgen::time_varying_phdae(rng, 3, 2, false);
  REQUIRE(verify_structure(sys).passed);
  const InputSignal u = InputSignal::polynomial(
      {0.2 * Vector::Ones(2), Vector(0.3 * Vector::Ones(2))});
  Vector x0 = Vector::Zero(3);
  x0(0) = 0.5;
  const auto worst = [&](Index steps) {
    const Trajectory t = integrate(sys, u, x0, steps);
    return energy_audit(t, sys, &u).max_balance_residual;
  };
  const double w1 = worst(100);
  const double w2 = worst(200);
  CHECK(w2 < w1);
  const auto cumulative = [&](Index steps) {
    const Trajectory t = integrate(sys, u, x0, steps);
    return energy_audit(t, sys, &u).cumulative_balance_residual;
  };
  const double order = std::log2(cumulative(100) / cumulative(200));
  CHECK(order > 1.8);
  CHECK(order < 2.2);
}

TEST_CASE("strict dissipation yields a nonnegative margin at zero input") {
  std::mt19937 rng(11);
  const PHDAESystem sys = models::preset("acoustic");
  Vector x0(sys.n);
  std::normal_distribution<double> dist;
  for (Index i = 0; i < sys.n; ++i) x0(i) = dist(rng);
  const Trajectory traj = integrate(sys, InputSignal::zero(1), x0, 500);
  const EnergyReport rep = energy_audit(traj, sys);
  CHECK(rep.dissipation_margin >= -1e-10);
  CHECK_FALSE(rep.violated);
}

TEST_CASE("index-one trajectories satisfy the algebraic constraint at every step") {
  const Matrix e = (Matrix(2, 2) << 1, 0, 0, 0).finished();
  const Matrix j = (Matrix(2, 2) << 0, 1, -1, 0).finished();
  const Matrix r = (Matrix(2, 2) << 0, 0, 0, 1).finished();
  const PHDAESystem sys = PHDAESystem::pencil(
      MatFun::constant(e), MatFun::constant(j), MatFun::constant(r), 0.0, 1.0);
  Vector x0(2);
  x0 << 1.0, -1.0;  // 0 = -x1 - x2 satisfied
  const Trajectory traj = integrate(sys, InputSignal::zero(0), x0, 300);
  const Matrix ze = left_nullspace(e);
  const Matrix a = sys.a_matrix(0.0);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    CHECK((ze.transpose() * a * traj.states[k]).norm() <= 1e-10);
  }
}

TEST_CASE("inconsistent initial data is rejected, projection repairs it") {
  const Matrix e = (Matrix(2, 2) << 1, 0, 0, 0).finished();
  const Matrix j = (Matrix(2, 2) << 0, 1, -1, 0).finished();
  const Matrix r = (Matrix(2, 2) << 0, 0, 0, 1).finished();
  const PHDAESystem sys = PHDAESystem::pencil(
      MatFun::constant(e), MatFun::constant(j), MatFun::constant(r), 0.0, 1.0);
  Vector x0(2);
  x0 << 1.0, 2.0;  // violates 0 = -x1 - x2
  CHECK_THROWS_AS(integrate(sys, InputSignal::zero(0), x0, 100), NumericalError);
  IntegrateOptions opts;
  opts.project_initial_state = true;
  const Trajectory traj = integrate(sys, InputSignal::zero(0), x0, 100, opts);
  CHECK(traj.states.front()(0) == doctest::Approx(1.0));
  CHECK(traj.states.front()(1) == doctest::Approx(-1.0));
}

TEST_CASE("input signals: polynomial and sampled evaluation") {
  const InputSignal p = InputSignal::polynomial(
      {Vector::Constant(1, 1.0), Vector::Constant(1, 2.0)});
  CHECK(p(0.5)(0) == doctest::Approx(2.0));
  const InputSignal s = InputSignal::sampled(
      {0.0, 1.0}, {Vector::Constant(1, 0.0), Vector::Constant(1, 4.0)});
  CHECK(s(0.25)(0) == doctest::Approx(1.0));
  CHECK(s(2.0)(0) == doctest::Approx(4.0));  // clamped
  CHECK_THROWS_AS(InputSignal::sampled({0.0}, {Vector::Zero(1)}), ShapeError);
}

TEST_CASE("derivative reconstruction: constants, quadratic exactness, errors") {
  std::vector<double> times{0.0, 0.1, 0.2, 0.3, 0.4};
  SUBCASE("constant samples give zero") {
    std::vector<double> vals(5, 3.7);
    for (double d : reconstruct_derivative(times, vals)) {
      CHECK(std::abs(d) < 1e-12);
    }
  }
  SUBCASE("t^2 is differentiated exactly, ends included") {
    std::vector<double> vals;
    for (double t : times) vals.push_back(t * t);
    const std::vector<double> d = reconstruct_derivative(times, vals);
    for (std::size_t i = 0; i < times.size(); ++i) {
      CHECK(d[i] == doctest::Approx(2.0 * times[i]).epsilon(1e-12));
    }
  }
  SUBCASE("nonuniform grids keep quadratic exactness") {
    std::vector<double> tg{0.0, 0.05, 0.21, 0.3, 0.55};
    std::vector<double> vals;
    for (double t : tg) vals.push_back(t * t - t);
    const std::vector<double> d = reconstruct_derivative(tg, vals);
    for (std::size_t i = 0; i < tg.size(); ++i) {
      CHECK(d[i] == doctest::Approx(2.0 * tg[i] - 1.0).epsilon(1e-10));
    }
  }
  SUBCASE("too few samples are rejected") {
    CHECK_THROWS_AS(reconstruct_derivative({0.0, 1.0}, {1.0, 2.0}), ShapeError);
  }
}

TEST_CASE("trajectory component derivative accessor") {
  const PHDAESystem sys = models::preset("oscillator");
  Vector x0(4);
  x0 << 1.0, 0.0, 0.0, 0.0;
  const Trajectory traj = integrate(sys, InputSignal::zero(0), x0, 100);
  const std::vector<double> d = reconstruct_derivative(traj, 0);
  CHECK(d.size() == traj.times.size());
  CHECK_THROWS_AS(reconstruct_derivative(traj, 9), ShapeError);
}
