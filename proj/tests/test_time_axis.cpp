#include "evolab/time_axis.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace evolab;
using evolab::testing::gaussian_signal;
using evolab::testing::random_interior_signal;

namespace {

// Independent O(n^2) transform oracle: direct summation of the defining sum.
Spectrum direct_fourier_laplace(const WeightedSignal& f) {
  const int n = f.grid.n_samples();
  Mat coeffs(f.dim(), n);
  for (int k = 0; k < n; ++k) {
    Vec acc = Vec::Zero(f.dim());
    for (int s = 0; s < n; ++s) {
      const double t = f.grid.time(s);
      acc += std::exp(Complex(-f.rho * t, -f.grid.xi(k) * t)) * f.values.col(s);
    }
    coeffs.col(k) = acc * f.grid.dt() / std::sqrt(2.0 * kPi);
  }
  return Spectrum{f.grid, std::move(coeffs), f.rho};
}

}  // namespace

TEST_CASE("time_axis: grid validation") {
  CHECK_THROWS_AS(TimeGrid(1.0, 0.0, 64), ContractViolation);
  CHECK_THROWS_AS(TimeGrid(0.0, 1.0, 48), ContractViolation);  // not a power of two
  CHECK_THROWS_AS(TimeGrid(0.0, 1.0, 2), ContractViolation);
  const TimeGrid g(0.0, 16.0, 256);
  CHECK(g.dt() == doctest::Approx(16.0 / 256));
  CHECK(g.xi(0) == 0.0);
  CHECK(g.xi(1) == doctest::Approx(2.0 * kPi / 16.0));
  CHECK(g.xi(255) == doctest::Approx(-2.0 * kPi / 16.0));
  CHECK_THROWS_AS(WeightedSignal(g, Mat::Zero(1, 256), -1.0), ContractViolation);
  CHECK_THROWS_AS(WeightedSignal(g, Mat::Zero(1, 255), 1.0), ContractViolation);
}

TEST_CASE("time_axis: weighted inner products") {
  // constant 1 on [0,1], rho = 1: integral (1 - e^{-2})/2, grid-aligned jumps
  const TimeGrid g(-4.0, 4.0, 4096);
  Mat ind = Mat::Zero(1, g.n_samples());
  for (int s = 0; s < g.n_samples(); ++s) {
    const double t = g.time(s);
    if (t >= 0.0 && t <= 1.0) ind(0, s) = 1.0;
  }
  const WeightedSignal f(g, ind, 1.0);
  const double exact = (1.0 - std::exp(-2.0)) / 2.0;
  CHECK(std::abs(weighted_inner(f, f).real() - exact) < 3e-3);  // O(dt) at the jumps

  // pointwise-orthogonal constant vectors, d = 2
  Mat a = Mat::Zero(2, g.n_samples()), b = Mat::Zero(2, g.n_samples());
  a.row(0).setConstant(1.0);
  b.row(1).setConstant(1.0);
  const WeightedSignal fa(g, a, 1.0), fb(g, b, 1.0);
  CHECK(std::abs(weighted_inner(fa, fb)) == 0.0);

  // f = e^{rho t} 1_{[0,1]}, g = 1_{[0,1]}: integral of e^{-t} = 1 - e^{-1},
  // confirmed against a fine-grid quadrature oracle at 10x resolution
  auto weighted_box = [](const TimeGrid& grid, bool exp_weight) {
    Mat v = Mat::Zero(1, grid.n_samples());
    for (int s = 0; s < grid.n_samples(); ++s) {
      const double t = grid.time(s);
      if (t >= 0.0 && t <= 1.0) v(0, s) = exp_weight ? std::exp(t) : 1.0;
    }
    return v;
  };
  const WeightedSignal fe(g, weighted_box(g, true), 1.0);
  const WeightedSignal ge(g, weighted_box(g, false), 1.0);
  const Complex coarse = weighted_inner(fe, ge);
  const TimeGrid g10(-4.0, 4.0, 32768);  // finer grid oracle
  const WeightedSignal fe10(g10, weighted_box(g10, true), 1.0);
  const WeightedSignal ge10(g10, weighted_box(g10, false), 1.0);
  const Complex fine = weighted_inner(fe10, ge10);
  const double exact3 = 1.0 - std::exp(-1.0);
  CHECK(std::abs(coarse - fine) < 3e-3);
  CHECK(std::abs(fine.real() - exact3) < 4e-4);

  // mismatches rejected
  const TimeGrid g2(-4.0, 4.0, 2048);
  CHECK_THROWS_AS(weighted_inner(f, WeightedSignal(g2, Mat::Zero(1, 2048), 1.0)),
                  ContractViolation);
  CHECK_THROWS_AS(weighted_inner(f, f.with_rho(2.0)), ContractViolation);
  CHECK_THROWS_AS(weighted_inner(fa, f), ContractViolation);
}

TEST_CASE("time_axis: fourier_laplace basics") {
  const TimeGrid g(0.0, 16.0, 256);
  const WeightedSignal zero(g, Mat::Zero(2, 256), 1.5);
  CHECK(fourier_laplace(zero).coeffs.cwiseAbs().maxCoeff() == 0.0);
  CHECK(inverse_fourier_laplace(fourier_laplace(zero)).values.cwiseAbs().maxCoeff() == 0.0);

  const WeightedSignal f = gaussian_signal(g, 2.0, 8.0, 1.0, 3);
  const WeightedSignal back = inverse_fourier_laplace(fourier_laplace(f));
  WeightedSignal diff(g, back.values - f.values, f.rho);
  CHECK(weighted_norm(diff) / weighted_norm(f) < 1e-10);
  // pointwise on the middle half, where the exponential unweighting stays tame
  const double scale = f.values.cwiseAbs().maxCoeff();
  for (int s = g.n_samples() / 4; s < 3 * g.n_samples() / 4; ++s)
    CHECK((back.values.col(s) - f.values.col(s)).cwiseAbs().maxCoeff() < 1e-10 * scale);
}

TEST_CASE("time_axis: transform matches the direct-summation oracle") {
  const TimeGrid g(-2.0, 6.0, 64);
  const WeightedSignal f = random_interior_signal(g, 1.0, 7, 2);
  const Spectrum fast = fourier_laplace(f);
  const Spectrum slow = direct_fourier_laplace(f);
  CHECK(evolab::testing::max_abs_diff(fast.coeffs, slow.coeffs) <
        1e-12 * slow.coeffs.cwiseAbs().maxCoeff());
  // Plancherel on the same small grid
  CHECK(spectrum_norm(fast) / weighted_norm(f) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("time_axis: unitarity on interior-supported signals") {
  const TimeGrid g(0.0, 16.0, 1024);
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const WeightedSignal f = random_interior_signal(g, 2.0, seed, 2);
    const double ratio = spectrum_norm(fourier_laplace(f)) / weighted_norm(f);
    CHECK(std::abs(ratio - 1.0) < 1e-8);
  }
}

TEST_CASE("time_axis: single-frequency spectrum inverts to the analytic kernel") {
  const TimeGrid g(0.0, 8.0, 128);
  const double rho = 1.5;
  const int k0 = 9;
  Mat coeffs = Mat::Zero(1, 128);
  coeffs(0, k0) = 1.0;
  const WeightedSignal u = inverse_fourier_laplace(Spectrum{g, coeffs, rho});
  // expected: (sqrt(2 pi)/T) e^{(i xi_{k0} + rho) t}
  const double amp = std::sqrt(2.0 * kPi) / g.duration();
  for (int s = 0; s < g.n_samples(); s += 17) {
    const double t = g.time(s);
    const Complex expected = amp * std::exp(Complex(rho * t, g.xi(k0) * t));
    CHECK(std::abs(u.values(0, s) - expected) < 1e-10 * std::abs(expected));
  }
}

TEST_CASE("time_axis: derivative against analytic and finite-difference oracles") {
  const TimeGrid g(0.0, 16.0, 1024);
  const double rho = 2.0, c = 7.0, w = 1.2;
  const int n = g.n_samples();
  Mat values(1, n), danalytic(1, n);
  for (int s = 0; s < n; ++s) {
    const double t = g.time(s);
    const double bump = std::exp(-std::pow((t - c) / w, 2));
    values(0, s) = std::exp(rho * t) * bump;
    danalytic(0, s) =
        std::exp(rho * t) * bump * (rho - 2.0 * (t - c) / (w * w));
  }
  const WeightedSignal f(g, values, rho);
  const WeightedSignal df = time_derivative(f);
  const double dt = g.dt();
  double worst_fd = 0.0, worst_an = 0.0, scale = 0.0;
  for (int s = 1; s < n - 1; ++s) {
    const double t = g.time(s);
    if (t < c - 3.0 * w || t > c + 3.0 * w) continue;  // bump interior
    const Complex fd = (f.values(0, s + 1) - f.values(0, s - 1)) / (2.0 * dt);
    worst_fd = std::max(worst_fd, std::abs(df.values(0, s) - fd));
    worst_an = std::max(worst_an, std::abs(df.values(0, s) - danalytic(0, s)));
    scale = std::max(scale, std::abs(danalytic(0, s)));
  }
  // spectral derivative is near-exact; the FD oracle differs by its own O(dt^2)
  CHECK(worst_an < 1e-7 * scale);
  CHECK(worst_fd < 2.0 * dt * dt * scale);
  CHECK(worst_fd > 0.0);

  const WeightedSignal zero(g, Mat::Zero(1, n), rho);
  CHECK(time_derivative(zero).values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("time_axis: antiderivative ramp and zero") {
  const TimeGrid g(-4.0, 4.0, 2048);
  Mat ind = Mat::Zero(1, g.n_samples());
  for (int s = 0; s < g.n_samples(); ++s) {
    const double t = g.time(s);
    if (t >= 0.0 && t <= 1.0) ind(0, s) = 1.0;
  }
  const WeightedSignal f(g, ind, 1.0);
  const WeightedSignal F = antiderivative(f);
  const double dt = g.dt();
  for (int s = 0; s < g.n_samples(); s += 41) {
    const double t = g.time(s);
    double expected = 0.0;
    if (t >= 0.0 && t <= 1.0) expected = t;
    if (t > 1.0) expected = 1.0;
    CHECK(std::abs(F.values(0, s).real() - expected) <= dt);
  }
  const WeightedSignal zero(g, Mat::Zero(1, g.n_samples()), 1.0);
  CHECK(antiderivative(zero).values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("time_axis: spectral and cumulative antiderivatives agree") {
  // calibrated grid: the trapezoid path is O(dt^2)
  const TimeGrid g(0.0, 16.0, 8192);
  const WeightedSignal f = random_interior_signal(g, 2.0, 11);
  const WeightedSignal a_cum = antiderivative(f);
  const WeightedSignal a_spec = antiderivative_spectral(f);
  WeightedSignal diff(g, a_cum.values - a_spec.values, f.rho);
  CHECK(weighted_norm(diff) / weighted_norm(f) < 1e-6);
}

TEST_CASE("time_axis: derivative and antiderivative invert each other") {
  const TimeGrid g(0.0, 16.0, 16384);
  const WeightedSignal f = random_interior_signal(g, 2.0, 13);
  const double fn = weighted_norm(f);

  // spectral pair is exact up to roundoff
  WeightedSignal r1(g, time_derivative(antiderivative_spectral(f)).values - f.values, f.rho);
  CHECK(weighted_norm(r1) / fn < 1e-10);
  // canonical cumulative path within the documented tolerance
  WeightedSignal r2(g, time_derivative(antiderivative(f)).values - f.values, f.rho);
  CHECK(weighted_norm(r2) / fn < 1e-6);
  WeightedSignal r3(g, antiderivative(time_derivative(f)).values - f.values, f.rho);
  CHECK(weighted_norm(r3) / fn < 1e-6);
}

TEST_CASE("time_axis: antiderivative is exactly causal") {
  const TimeGrid g(0.0, 8.0, 256);
  WeightedSignal f1 = random_interior_signal(g, 1.0, 17);
  WeightedSignal f2 = f1;
  const int s0 = 130;
  for (int s = s0 + 1; s < g.n_samples(); ++s) f2.values(0, s) += Complex(1.0, -0.5);
  const WeightedSignal F1 = antiderivative(f1);
  const WeightedSignal F2 = antiderivative(f2);
  for (int s = 0; s <= s0; ++s) CHECK(F1.values(0, s) == F2.values(0, s));  // bitwise
  CHECK(std::abs(F1.values(0, s0 + 1) - F2.values(0, s0 + 1)) > 0.0);
}

TEST_CASE("time_axis: shifts and truncations") {
  const TimeGrid g(0.0, 8.0, 512);
  const WeightedSignal f = gaussian_signal(g, 1.0, 4.0, 0.5);
  const double dt = g.dt();

  CHECK(evolab::testing::max_abs_diff(time_shift(f, 0.0).values, f.values) == 0.0);

  const WeightedSignal roundtrip = time_shift(time_shift(f, 10.0 * dt), -10.0 * dt);
  for (int s = 11; s < g.n_samples() - 11; ++s)
    CHECK(roundtrip.values(0, s) == f.values(0, s));

  CHECK_THROWS_AS(time_shift(f, 0.4 * dt), ContractViolation);

  CHECK(evolab::testing::max_abs_diff(truncate_before(f, 9.0).values, f.values) == 0.0);
  CHECK(truncate_before(f, -1.0).values.cwiseAbs().maxCoeff() == 0.0);
  const WeightedSignal once = truncate_before(f, 4.1);
  const WeightedSignal twice = truncate_before(once, 4.1);
  CHECK(evolab::testing::max_abs_diff(once.values, twice.values) == 0.0);
}

TEST_CASE("time_axis: operations are linear") {
  const TimeGrid g(0.0, 8.0, 256);
  const WeightedSignal f = random_interior_signal(g, 1.5, 23, 2);
  const WeightedSignal h = random_interior_signal(g, 1.5, 29, 2);
  const Complex a(0.7, -1.3), b(-0.2, 0.4);
  WeightedSignal combo(g, a * f.values + b * h.values, 1.5);

  auto check_linear = [&](auto op) {
    const Mat lhs = op(combo).values;
    const Mat rhs = a * op(f).values + b * op(h).values;
    CHECK(evolab::testing::max_abs_diff(lhs, rhs) <
          1e-12 * (rhs.cwiseAbs().maxCoeff() + 1.0));
  };
  check_linear([](const WeightedSignal& s) { return time_derivative(s); });
  check_linear([](const WeightedSignal& s) { return antiderivative(s); });
  check_linear([](const WeightedSignal& s) { return antiderivative_spectral(s); });
  check_linear([](const WeightedSignal& s) { return truncate_before(s, 5.0); });
  check_linear([](const WeightedSignal& s) { return time_shift(s, 3.0 * s.grid.dt()); });
}

TEST_CASE("time_axis: boundary leakage measurement") {
  const TimeGrid g(0.0, 16.0, 512);
  CHECK(boundary_leakage(gaussian_signal(g, 1.0, 8.0, 0.5)) < 1e-12);
  CHECK(boundary_leakage(gaussian_signal(g, 1.0, 1.0, 0.5)) > 0.5);
}

TEST_CASE("time_axis: csv roundtrip") {
  const TimeGrid g(0.0, 4.0, 64);
  const WeightedSignal f = random_interior_signal(g, 1.0, 31, 2);
  std::stringstream ss;
  write_signal_csv(ss, f);
  const WeightedSignal back = read_signal_csv(ss, f.rho);
  REQUIRE(back.dim() == f.dim());
  REQUIRE(back.grid.n_samples() == f.grid.n_samples());
  CHECK(evolab::testing::max_abs_diff(back.values, f.values) == 0.0);  // 17 digits roundtrip
  CHECK(back.grid.t_min() == doctest::Approx(f.grid.t_min()));
}
