#pragma once

#include "evolab/common.hpp"

#include <iosfwd>

namespace evolab {

/// Uniform truncation [t_min, t_max) of the time line. Samples sit at
/// t_s = t_min + s*dt; the companion frequency grid is
/// xi_k = 2*pi*k' / (t_max - t_min) with k' the signed FFT index.
class TimeGrid {
 public:
  TimeGrid(double t_min, double t_max, int n_samples);

  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  int n_samples() const { return n_; }
  double dt() const { return (t_max_ - t_min_) / n_; }
  double duration() const { return t_max_ - t_min_; }
  double time(int s) const { return t_min_ + s * dt(); }

  /// Signed frequency index: k' = k for k < n/2, k - n otherwise.
  int signed_index(int k) const { return k < n_ / 2 ? k : k - n_; }
  double xi(int k) const { return 2.0 * kPi * signed_index(k) / duration(); }
  double nyquist() const { return kPi / dt(); }

  bool operator==(const TimeGrid& other) const {
    return t_min_ == other.t_min_ && t_max_ == other.t_max_ && n_ == other.n_;
  }

 private:
  double t_min_;
  double t_max_;
  int n_;
};

/// Time-sampled d-vector-valued function paired with the exponential
/// weight rho of the ambient L_{2,rho} space. values(i, s) is component i
/// at sample s; the stored samples are the unweighted function values.
struct WeightedSignal {
  TimeGrid grid;
  Mat values;  // d x n_samples
  double rho;

  WeightedSignal(TimeGrid g, Mat v, double r);
  int dim() const { return static_cast<int>(values.rows()); }

  /// Same samples reinterpreted in L_{2,mu}; requires mu > 0.
  WeightedSignal with_rho(double mu) const;
};

/// Frequency-side coefficients of a WeightedSignal, indexed like the FFT
/// layout of the originating grid.
struct Spectrum {
  TimeGrid grid;
  Mat coeffs;  // d x n_samples
  double rho;

  int dim() const { return static_cast<int>(coeffs.rows()); }
  Complex z(int k) const { return Complex(rho, grid.xi(k)); }
};

/// Weighted scalar product sum_s <f_s, g_s> e^{-2 rho t_s} dt with
/// trapezoidal end weights; first argument is conjugated.
Complex weighted_inner(const WeightedSignal& f, const WeightedSignal& g);
double weighted_norm(const WeightedSignal& f);

/// L_2 norm of the frequency side, sqrt(sum_k |F_k|^2 dxi).
double spectrum_norm(const Spectrum& F);

/// Discrete Fourier-Laplace transform: one FFT of the pre-weighted samples
/// e^{-rho t} f(t), scaled to the kernel e^{-(i xi + rho)t} / sqrt(2 pi).
Spectrum fourier_laplace(const WeightedSignal& f);
WeightedSignal inverse_fourier_laplace(const Spectrum& F);

/// Spectral derivative: multiply by (i xi_k + rho).
WeightedSignal time_derivative(const WeightedSignal& f);

/// Causal antiderivative, canonical path: cumulative trapezoid from the
/// left grid edge. Requires rho > 0.
WeightedSignal antiderivative(const WeightedSignal& f);

/// Cross-check path for the antiderivative: spectral division by
/// (i xi_k + rho). Requires rho > 0.
WeightedSignal antiderivative_spectral(const WeightedSignal& f);

/// tau_h f(t) = f(t+h); h must be an integer multiple of dt. Implemented
/// as a shift with the wrapped region zeroed.
WeightedSignal time_shift(const WeightedSignal& f, double h);

/// Sets values at t > a to zero; idempotent.
WeightedSignal truncate_before(const WeightedSignal& f, double a);

/// Weighted mass fraction outside the middle 50% of the grid. Experiment
/// inputs are expected to keep this negligible; the value is reported,
/// not silently accepted.
double boundary_leakage(const WeightedSignal& f);

/// CSV with header t,re_0,im_0,...,re_{d-1},im_{d-1}, one row per sample,
/// 17 significant digits.
void write_signal_csv(std::ostream& os, const WeightedSignal& f);
WeightedSignal read_signal_csv(std::istream& is, double rho);

}  // namespace evolab
