#include "evolab/space_ops.hpp"

#include "evolab/homogenize.hpp"  // longitudinal_exact for the quadrature oracle

#include <doctest.h>

#include <cmath>

using namespace evolab;

TEST_CASE("space_ops: grid validation") {
  CHECK_THROWS_AS(SpaceGrid(0.0, 8), ContractViolation);
  CHECK_THROWS_AS(SpaceGrid(1.0, 3), ContractViolation);
  CHECK_THROWS_AS(SpaceGrid(1.0, 8, 1.0, 2), ContractViolation);
  const SpaceGrid g(2.0, 8, 3.0, 4);
  CHECK(g.dim() == 32);
  CHECK(g.h_x() == doctest::Approx(0.25));
  CHECK(g.h_y() == doctest::Approx(0.75));
}

TEST_CASE("space_ops: periodic derivative is exactly skew and kills constants") {
  const SpaceGrid g(3.0, 64);
  const SpatialOperator d = periodic_derivative(g);
  CHECK(d.tags.skew_adjoint);
  // entrywise exact antisymmetry
  CHECK((d.matrix + d.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((d.matrix * Vec::Constant(64, 1.0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("space_ops: periodic derivative against the analytic oracle") {
  const SpaceGrid g(4.0, 128);
  const SpatialOperator d = periodic_derivative(g);
  const double k = 2.0 * kPi / g.length_x();
  Vec sinv(128), cosv(128);
  for (int j = 0; j < 128; ++j) {
    sinv(j) = std::sin(k * g.x(j));
    cosv(j) = std::cos(k * g.x(j));
  }
  // exact discrete identity: D sin(kx) = cos(kx) * sin(k h)/h
  const double factor = std::sin(k * g.h_x()) / g.h_x();
  const Vec applied = d.matrix * sinv;
  CHECK((applied - factor * cosv).cwiseAbs().maxCoeff() < 1e-13 * std::abs(factor));
  // the sinc-corrected factor is within O(h^2) of the analytic wavenumber
  const double h = g.h_x();
  CHECK(std::abs(factor - k) <= k * k * k * h * h / 6.0 * 1.0001);
}

TEST_CASE("space_ops: 2d derivatives act along their axis") {
  const SpaceGrid g(1.0, 8, 2.0, 6);
  const SpatialOperator dx = periodic_derivative(g, Axis::X);
  const SpatialOperator dy = periodic_derivative(g, Axis::Y);
  CHECK((dx.matrix + dx.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((dy.matrix + dy.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);

  // separable field u(x,y) = p(x) q(y), flattened x-fastest
  const double kx = 2.0 * kPi / g.length_x();
  const double ky = 2.0 * kPi / g.length_y();
  Vec u(g.dim()), dxu_expect(g.dim()), dyu_expect(g.dim());
  const double fx = std::sin(kx * g.h_x()) / g.h_x();
  const double fy = std::sin(ky * g.h_y()) / g.h_y();
  for (int iy = 0; iy < g.n_y(); ++iy) {
    for (int ix = 0; ix < g.n_x(); ++ix) {
      const int idx = ix + g.n_x() * iy;
      u(idx) = std::sin(kx * g.x(ix)) * std::sin(ky * g.y(iy));
      dxu_expect(idx) = fx * std::cos(kx * g.x(ix)) * std::sin(ky * g.y(iy));
      dyu_expect(idx) = fy * std::sin(kx * g.x(ix)) * std::cos(ky * g.y(iy));
    }
  }
  CHECK((dx.matrix * u - dxu_expect).cwiseAbs().maxCoeff() < 1e-13 * fx);
  CHECK((dy.matrix * u - dyu_expect).cwiseAbs().maxCoeff() < 1e-13 * fy);

  CHECK_THROWS_AS(periodic_derivative(SpaceGrid(1.0, 8), Axis::Y), ContractViolation);
}

TEST_CASE("space_ops: multiplication operators") {
  RealVec ones = RealVec::Constant(16, 1.0);
  const SpatialOperator id = multiplication_operator(ones);
  CHECK(id.tags.identity);
  CHECK(id.tags.diagonal);
  CHECK((id.matrix - Mat::Identity(16, 16)).cwiseAbs().maxCoeff() == 0.0);

  const SpaceGrid g(1.0, 64);
  RealVec a(64);
  for (int j = 0; j < 64; ++j) a(j) = 2.0 + std::sin(2.0 * kPi * g.x(j));
  const SpatialOperator ma = multiplication_operator(a);
  CHECK(ma.tags.diagonal);
  CHECK(!ma.tags.identity);
  CHECK(operator_norm(ma.matrix) == doctest::Approx(a.maxCoeff()).epsilon(1e-12));
  CHECK(a.maxCoeff() == doctest::Approx(3.0));  // grid hits the max of 2 + sin

  const SpatialOperator minv = multiplication_operator(RealVec(a.cwiseInverse()));
  CHECK((ma.matrix * minv.matrix - Mat::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-15);

  // positive real samples: Hermitian part >= min sample exactly
  CHECK(lambda_min_hermitian(hermitian_part(ma.matrix)) ==
        doctest::Approx(a.minCoeff()).epsilon(1e-12));
}

TEST_CASE("space_ops: skew tags survive real combinations") {
  const SpaceGrid g(1.0, 32);
  const SpatialOperator d = periodic_derivative(g);
  const SpatialOperator combo =
      operator_add(operator_scale(Complex(2.5, 0.0), d), operator_scale(Complex(-0.5, 0.0), d));
  CHECK(combo.tags.skew_adjoint);
  CHECK((combo.matrix + combo.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);
  // imaginary scaling loses the tag
  CHECK(!operator_scale(Complex(0.0, 1.0), d).tags.skew_adjoint);
}

TEST_CASE("space_ops: resolvent solve basics") {
  const int d = 24;
  SpatialOperator C = SpatialOperator::identity(d);
  C.matrix *= 2.5;
  const SpatialOperator A0 = SpatialOperator::zero(d);
  Rng rng(5);
  Vec psi(d);
  for (int i = 0; i < d; ++i) psi(i) = Complex(rng.normal(), rng.normal());
  const Vec phi = resolvent_solve(C, A0, psi, 2.5);
  CHECK((phi - psi / 2.5).cwiseAbs().maxCoeff() < 1e-14 * psi.cwiseAbs().maxCoeff());

  SpatialOperator not_skew = SpatialOperator::dense(Mat::Identity(d, d));
  CHECK_THROWS_AS(resolvent_solve(C, not_skew, psi, 2.5), ContractViolation);
}

TEST_CASE("space_ops: resolvent norm bound over random data") {
  // Remark-level bound ||(C+A)^{-1}|| <= 1/alpha, exercised over 100 draws
  const SpaceGrid g(1.0, 48);
  const SpatialOperator A = periodic_derivative(g);
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    RealVec a(48);
    for (int j = 0; j < 48; ++j) a(j) = 1.0 + 2.0 * rng.uniform();
    const double rho = 0.5 + 3.0 * rng.uniform();
    const double alpha = rho * a.cwiseInverse().minCoeff();
    SpatialOperator C = multiplication_operator(RealVec(rho * a.cwiseInverse()));
    Vec psi(48);
    for (int i = 0; i < 48; ++i) psi(i) = Complex(rng.normal(), rng.normal());
    const Vec phi = resolvent_solve(C, A, psi, alpha);  // throws if the bound fails
    CHECK(phi.norm() <= (1.0 / alpha) * psi.norm() * (1.0 + 1e-8));
  }
}

TEST_CASE("space_ops: resolvent matches the exponential-kernel quadrature oracle") {
  // (rho/c + D) phi = psi against the whole-line formula, Richardson pair.
  // The torus solve carries wrap images of size e^{-rho(x + L - center)};
  // the comparison window keeps them below the tolerance.
  const double lx = 8.0, rho = 3.0, c = 1.0, w = 0.8, center = 4.0;
  auto psi_fn = [&](double x) { return std::exp(-std::pow((x - center) / w, 2)); };
  auto a_fn = [&](double) { return c; };
  auto matrix_solution = [&](int nx) {
    const SpaceGrid g(lx, nx);
    const SpatialOperator A = periodic_derivative(g);
    SpatialOperator C = multiplication_operator(RealVec(RealVec::Constant(nx, rho / c)));
    Vec psi(nx);
    for (int j = 0; j < nx; ++j) psi(j) = psi_fn(g.x(j));
    return resolvent_solve(C, A, psi, rho / c);
  };
  const Vec coarse = matrix_solution(1024);
  const Vec fine = matrix_solution(2048);
  Vec richardson(1024);
  for (int j = 0; j < 1024; ++j) richardson(j) = (4.0 * fine(2 * j) - coarse(j)) / 3.0;

  const SpaceGrid g(lx, 1024);
  RealVec points(1024);
  for (int j = 0; j < 1024; ++j) points(j) = g.x(j);
  const Vec oracle = longitudinal_exact(a_fn, rho, psi_fn, points, 0.0, 32);
  const double scale = oracle.cwiseAbs().maxCoeff();
  auto window_err = [&](const Vec& v, const Vec& ref) {
    double worst = 0.0;
    for (int j = 0; j < 1024; ++j)
      if (points(j) >= 2.5) worst = std::max(worst, std::abs(v(j) - ref(j)));
    return worst / scale;
  };
  CHECK(window_err(richardson, oracle) < 1e-6);
  // raw second-order solves converge at O(h^2) toward the same oracle
  const double err_coarse = window_err(coarse, oracle);
  Vec fine_on_coarse(1024);
  for (int j = 0; j < 1024; ++j) fine_on_coarse(j) = fine(2 * j);
  CHECK(window_err(fine_on_coarse, oracle) < 0.3 * err_coarse);
}

TEST_CASE("space_ops: A contributes no real quadratic form") {
  const SpaceGrid g(1.0, 40);
  const SpatialOperator A = periodic_derivative(g);
  RealVec a(40);
  for (int j = 0; j < 40; ++j) a(j) = 2.0 + std::sin(2.0 * kPi * g.x(j));
  const SpatialOperator C = multiplication_operator(a);
  const Mat sum = C.matrix + A.matrix;
  Rng rng(777);
  for (int trial = 0; trial < 20; ++trial) {
    Vec phi(40);
    for (int i = 0; i < 40; ++i) phi(i) = Complex(rng.normal(), rng.normal());
    const double with_a = (phi.dot(sum * phi)).real();
    const double without = (phi.dot(C.matrix * phi)).real();
    CHECK(std::abs(with_a - without) < 1e-12 * std::abs(without));
  }
}

TEST_CASE("space_ops: resolvent solve is linear in psi") {
  const SpaceGrid g(1.0, 32);
  const SpatialOperator A = periodic_derivative(g);
  SpatialOperator C = SpatialOperator::identity(32);
  C.matrix *= Complex(1.5, 0.4);
  C.tags.identity = false;
  Rng rng(4242);
  Vec p1(32), p2(32);
  for (int i = 0; i < 32; ++i) {
    p1(i) = Complex(rng.normal(), rng.normal());
    p2(i) = Complex(rng.normal(), rng.normal());
  }
  const Complex c1(0.3, -0.8), c2(-1.1, 0.2);
  const ResolventSolver solver(C, A, 1.0);
  const Vec lhs = solver.solve(c1 * p1 + c2 * p2);
  const Vec rhs = c1 * solver.solve(p1) + c2 * solver.solve(p2);
  CHECK((lhs - rhs).norm() <= 1e-9 * rhs.norm());
}
