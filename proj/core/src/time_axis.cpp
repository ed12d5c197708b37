#include "evolab/time_axis.hpp"

#include "fft.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace evolab {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void require_compatible(const WeightedSignal& f, const WeightedSignal& g) {
  if (!(f.grid == g.grid)) throw ContractViolation("weighted_inner: grid mismatch");
  if (f.rho != g.rho) throw ContractViolation("weighted_inner: rho mismatch");
  if (f.dim() != g.dim()) throw ContractViolation("weighted_inner: dimension mismatch");
}

// Trapezoidal quadrature weight for sample s.
double quad_weight(int s, int n) { return (s == 0 || s == n - 1) ? 0.5 : 1.0; }

}  // namespace

TimeGrid::TimeGrid(double t_min, double t_max, int n_samples)
    : t_min_(t_min), t_max_(t_max), n_(n_samples) {
  if (!(t_min < t_max)) throw ContractViolation("TimeGrid: t_min must be < t_max");
  if (n_ < 4 || !is_power_of_two(n_))
    throw ContractViolation("TimeGrid: n_samples must be a power of two >= 4");
}

WeightedSignal::WeightedSignal(TimeGrid g, Mat v, double r)
    : grid(g), values(std::move(v)), rho(r) {
  if (rho <= 0.0) throw ContractViolation("WeightedSignal: rho must be > 0");
  if (values.cols() != grid.n_samples())
    throw ContractViolation("WeightedSignal: values length != n_samples");
  if (values.rows() < 1) throw ContractViolation("WeightedSignal: dimension must be >= 1");
}

WeightedSignal WeightedSignal::with_rho(double mu) const {
  return WeightedSignal(grid, values, mu);
}

Complex weighted_inner(const WeightedSignal& f, const WeightedSignal& g) {
  require_compatible(f, g);
  const int n = f.grid.n_samples();
  const double dt = f.grid.dt();
  Complex acc(0.0, 0.0);
  for (int s = 0; s < n; ++s) {
    const double w = quad_weight(s, n) * std::exp(-2.0 * f.rho * f.grid.time(s)) * dt;
    acc += w * f.values.col(s).dot(g.values.col(s));
  }
  return acc;
}

double weighted_norm(const WeightedSignal& f) {
  return std::sqrt(std::max(0.0, weighted_inner(f, f).real()));
}

double spectrum_norm(const Spectrum& F) {
  const double dxi = 2.0 * kPi / F.grid.duration();
  return std::sqrt(F.coeffs.squaredNorm() * dxi);
}

Spectrum fourier_laplace(const WeightedSignal& f) {
  const int n = f.grid.n_samples();
  const double dt = f.grid.dt();
  Mat work = f.values;
  for (int s = 0; s < n; ++s) work.col(s) *= std::exp(-f.rho * f.grid.time(s));
  detail::fft_rows_inplace(work, -1);
  // DFT -> integral: scale by dt/sqrt(2pi) and anchor the phase at t_min.
  const double scale = dt / std::sqrt(2.0 * kPi);
  for (int k = 0; k < n; ++k) {
    const Complex phase = std::exp(Complex(0.0, -f.grid.xi(k) * f.grid.t_min()));
    work.col(k) *= scale * phase;
  }
  return Spectrum{f.grid, std::move(work), f.rho};
}

WeightedSignal inverse_fourier_laplace(const Spectrum& F) {
  const int n = F.grid.n_samples();
  const double dt = F.grid.dt();
  Mat work = F.coeffs;
  const double scale = std::sqrt(2.0 * kPi) / (dt * n);
  for (int k = 0; k < n; ++k) {
    const Complex phase = std::exp(Complex(0.0, F.grid.xi(k) * F.grid.t_min()));
    work.col(k) *= scale * phase;
  }
  detail::fft_rows_inplace(work, +1);
  for (int s = 0; s < n; ++s) work.col(s) *= std::exp(F.rho * F.grid.time(s));
  return WeightedSignal(F.grid, std::move(work), F.rho);
}

WeightedSignal time_derivative(const WeightedSignal& f) {
  Spectrum F = fourier_laplace(f);
  for (int k = 0; k < F.grid.n_samples(); ++k) F.coeffs.col(k) *= F.z(k);
  return inverse_fourier_laplace(F);
}

WeightedSignal antiderivative(const WeightedSignal& f) {
  if (f.rho <= 0.0)
    throw ContractViolation("antiderivative: causal integral needs rho > 0");
  const int n = f.grid.n_samples();
  const double dt = f.grid.dt();
  Mat out(f.dim(), n);
  out.col(0).setZero();
  for (int s = 1; s < n; ++s)
    out.col(s) = out.col(s - 1) + 0.5 * dt * (f.values.col(s - 1) + f.values.col(s));
  return WeightedSignal(f.grid, std::move(out), f.rho);
}

WeightedSignal antiderivative_spectral(const WeightedSignal& f) {
  if (f.rho <= 0.0)
    throw ContractViolation("antiderivative_spectral: needs rho > 0");
  Spectrum F = fourier_laplace(f);
  for (int k = 0; k < F.grid.n_samples(); ++k) F.coeffs.col(k) /= F.z(k);
  return inverse_fourier_laplace(F);
}

WeightedSignal time_shift(const WeightedSignal& f, double h) {
  const double dt = f.grid.dt();
  const double steps = h / dt;
  const long m = std::lround(steps);
  if (std::abs(steps - static_cast<double>(m)) > 1e-9 * std::max(1.0, std::abs(steps)))
    throw ContractViolation("time_shift: h must be an integer multiple of dt");
  const int n = f.grid.n_samples();
  Mat out = Mat::Zero(f.dim(), n);
  for (int s = 0; s < n; ++s) {
    const long src = s + m;
    if (src >= 0 && src < n) out.col(s) = f.values.col(src);
  }
  return WeightedSignal(f.grid, std::move(out), f.rho);
}

WeightedSignal truncate_before(const WeightedSignal& f, double a) {
  Mat out = f.values;
  for (int s = 0; s < f.grid.n_samples(); ++s)
    if (f.grid.time(s) > a) out.col(s).setZero();
  return WeightedSignal(f.grid, std::move(out), f.rho);
}

double boundary_leakage(const WeightedSignal& f) {
  const int n = f.grid.n_samples();
  const double dt = f.grid.dt();
  double outer = 0.0, total = 0.0;
  const double lo = f.grid.t_min() + 0.25 * f.grid.duration();
  const double hi = f.grid.t_min() + 0.75 * f.grid.duration();
  for (int s = 0; s < n; ++s) {
    const double t = f.grid.time(s);
    const double m = quad_weight(s, n) * std::exp(-2.0 * f.rho * t) * dt *
                     f.values.col(s).squaredNorm();
    total += m;
    if (t < lo || t > hi) outer += m;
  }
  return total > 0.0 ? std::sqrt(outer / total) : 0.0;
}

void write_signal_csv(std::ostream& os, const WeightedSignal& f) {
  const int d = f.dim();
  os << "t";
  for (int i = 0; i < d; ++i) os << ",re_" << i << ",im_" << i;
  os << "\n";
  os.precision(17);
  for (int s = 0; s < f.grid.n_samples(); ++s) {
    os << f.grid.time(s);
    for (int i = 0; i < d; ++i)
      os << "," << f.values(i, s).real() << "," << f.values(i, s).imag();
    os << "\n";
  }
}

WeightedSignal read_signal_csv(std::istream& is, double rho) {
  std::string line;
  if (!std::getline(is, line)) throw ContractViolation("read_signal_csv: empty input");
  std::vector<double> times;
  std::vector<std::vector<Complex>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> nums;
    while (std::getline(ss, cell, ',')) nums.push_back(std::stod(cell));
    if (nums.size() < 3 || nums.size() % 2 == 0)
      throw ContractViolation("read_signal_csv: malformed row");
    times.push_back(nums[0]);
    std::vector<Complex> vals;
    for (std::size_t i = 1; i + 1 < nums.size(); i += 2) vals.emplace_back(nums[i], nums[i + 1]);
    rows.push_back(std::move(vals));
  }
  const int n = static_cast<int>(times.size());
  if (n < 4) throw ContractViolation("read_signal_csv: too few samples");
  const int d = static_cast<int>(rows.front().size());
  const double dt = times[1] - times[0];
  TimeGrid grid(times.front(), times.front() + dt * n, n);
  Mat values(d, n);
  for (int s = 0; s < n; ++s) {
    if (static_cast<int>(rows[s].size()) != d)
      throw ContractViolation("read_signal_csv: inconsistent dimension");
    for (int i = 0; i < d; ++i) values(i, s) = rows[s][i];
  }
  return WeightedSignal(grid, std::move(values), rho);
}

}  // namespace evolab
