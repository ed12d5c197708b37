#include "evolab/evo_solver.hpp"
#include "evolab/homogenize.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace evolab;

namespace {

RealVec coeff(int nx) {
  RealVec a(nx);
  for (int j = 0; j < nx; ++j) a(j) = 2.0 + std::sin(2.0 * kPi * 2.0 * j / nx);
  return a;
}

}  // namespace

static void BM_resolvent_solve(benchmark::State& state) {
  const int nx = static_cast<int>(state.range(0));
  const SpaceGrid grid(1.0, nx);
  const SpatialOperator A = periodic_derivative(grid);
  const double rho = 2.0;
  const RealVec a = coeff(nx);
  const SpatialOperator C = multiplication_operator(RealVec(rho * a.cwiseInverse()));
  const double alpha = rho * a.cwiseInverse().minCoeff();
  Vec psi(nx);
  for (int j = 0; j < nx; ++j) psi(j) = std::exp(-std::pow((grid.x(j) - 0.5) / 0.1, 2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(resolvent_solve(C, A, psi, alpha));
  }
}
BENCHMARK(BM_resolvent_solve)->Arg(128)->Arg(512)->Arg(768)->Unit(benchmark::kMillisecond);

static void BM_evolution_solve(benchmark::State& state) {
  const int nx = static_cast<int>(state.range(0));
  const int nt = static_cast<int>(state.range(1));
  const SpaceGrid grid(1.0, nx);
  const TimeGrid tg(0.0, 16.0, nt);
  const SpatialOperator A = periodic_derivative(grid);
  const double rho = 2.0;
  const RealVec a = coeff(nx);
  MaterialLaw law = reciprocal_coefficient_law(a, 0.5 * rho, rho * a.cwiseInverse().minCoeff());
  const LawCertificate cert = certify_accretivity(law, {rho}, 11, tg.nyquist());
  Mat values(nx, nt);
  for (int s = 0; s < nt; ++s) {
    const double ft = std::exp(-std::pow((tg.time(s) - 6.0) / 1.0, 2));
    for (int j = 0; j < nx; ++j)
      values(j, s) = ft * std::exp(-std::pow((grid.x(j) - 0.5) / 0.1, 2));
  }
  const WeightedSignal f(tg, values, rho);
  for (auto _ : state) {
    auto [u, rep] = solve(law, A, f, cert);
    benchmark::DoNotOptimize(u);
  }
}
BENCHMARK(BM_evolution_solve)->Args({64, 256})->Args({128, 256})->Unit(benchmark::kMillisecond);

static void BM_neumann_eval(benchmark::State& state) {
  const SpaceGrid grid(8.0, static_cast<int>(state.range(0)));
  const SpatialOperator A_x = periodic_derivative(grid);
  const MomentTable moments = periodic_moments(two_plus_sine_family(), 12);
  MaterialLaw law = neumann_limit_law(moments, A_x, 16.5, 12, 12);
  const Complex z(16.5, 3.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(law.eval(z));
  }
}
BENCHMARK(BM_neumann_eval)->Arg(48)->Arg(96)->Unit(benchmark::kMillisecond);
