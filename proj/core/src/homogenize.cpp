#include "evolab/homogenize.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>

namespace evolab {

namespace {

double grid_norm(const Vec& v, double h) { return std::sqrt(v.squaredNorm() * h); }

Vec normalized(Vec v, double h) {
  const double n = grid_norm(v, h);
  if (n > 0.0) v /= n;
  return v;
}

RealVec gaussian_profile(int n, double length, double center, double width) {
  RealVec v(n);
  const double h = length / n;
  for (int i = 0; i < n; ++i) {
    const double x = i * h;
    v(i) = std::exp(-std::pow((x - center) / width, 2));
  }
  return v;
}

RealVec indicator_profile(int n, double length, double a, double b) {
  RealVec v = RealVec::Zero(n);
  const double h = length / n;
  for (int i = 0; i < n; ++i) {
    const double x = i * h;
    if (x >= a && x < b) v(i) = 1.0;
  }
  return v;
}

// Real band-limited field from seeded Fourier coefficients on modes |k| <= kmax.
RealVec bandlimited_random(int n, int kmax, Rng& rng) {
  RealVec v = RealVec::Zero(n);
  const double c0 = rng.normal();
  for (int i = 0; i < n; ++i) v(i) = c0;
  for (int k = 1; k <= kmax; ++k) {
    const double re = rng.normal();
    const double im = rng.normal();
    for (int i = 0; i < n; ++i) {
      const double phase = 2.0 * kPi * k * i / n;
      v(i) += 2.0 * (re * std::cos(phase) - im * std::sin(phase));
    }
  }
  return v;
}

// Least-squares slope of log|y| against log(x).
double fit_loglog_slope(const std::vector<int>& xs, const std::vector<double>& ys) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
    if (ys[i] > 0.0) {
      lx.push_back(std::log(static_cast<double>(xs[i])));
      ly.push_back(std::log(ys[i]));
    }
  }
  if (lx.size() < 2) return 0.0;
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  return den > 0.0 ? num / den : 0.0;
}

constexpr double kCauchyFloor = 1e-11;

void finalize_report(GConvergenceReport& report, double tolerance) {
  report.tolerance = tolerance;
  const int rows = static_cast<int>(report.n_list.size());
  const int cols = static_cast<int>(report.test_ids.size());
  report.cauchy.clear();
  for (int i = 1; i < rows; ++i) {
    double c = 0.0;
    for (int j = 0; j < cols; ++j)
      c = std::max(c, std::abs(report.pairings(i, j) - report.pairings(i - 1, j)));
    report.cauchy.push_back(c);
  }
  bool cauchy_ok = true;
  for (std::size_t i = 1; i < report.cauchy.size(); ++i)
    if (report.cauchy[i] > std::max(report.cauchy[i - 1], kCauchyFloor)) cauchy_ok = false;
  if (report.limit_pairings.size() == cols && cols > 0) {
    report.defects.clear();
    for (int i = 0; i < rows; ++i) {
      double d = 0.0;
      for (int j = 0; j < cols; ++j)
        d = std::max(d, std::abs(report.pairings(i, j) - report.limit_pairings(j)));
      report.defects.push_back(d);
    }
    report.verdict = cauchy_ok && !report.defects.empty() && report.defects.back() <= tolerance;
    report.fitted_rate = fit_loglog_slope(report.n_list, report.defects);
  } else {
    report.verdict = cauchy_ok && !report.cauchy.empty() && report.cauchy.back() <= tolerance;
    std::vector<int> ns(report.n_list.begin() + 1, report.n_list.end());
    report.fitted_rate = fit_loglog_slope(ns, report.cauchy);
  }
}

// rho-weighted time window, normalized so ||w||_rho = 1.
Vec time_window(const TimeGrid& g, double rho, double center, double width) {
  const int n = g.n_samples();
  Vec w(n);
  for (int s = 0; s < n; ++s)
    w(s) = std::exp(-std::pow((g.time(s) - center) / width, 2));
  double norm2 = 0.0;
  const double dt = g.dt();
  for (int s = 0; s < n; ++s) {
    const double q = (s == 0 || s == n - 1) ? 0.5 : 1.0;
    norm2 += q * std::norm(w(s)) * std::exp(-2.0 * rho * g.time(s)) * dt;
  }
  if (norm2 > 0.0) w /= std::sqrt(norm2);
  return w;
}

// <w (x) chi, u>_rho for one space-time test; chi is conjugated, u is a
// d x n_samples signal, h the spatial cell measure.
Complex space_time_pairing(const Vec& window, const Vec& chi, const WeightedSignal& u,
                           double h) {
  const TimeGrid& g = u.grid;
  const int n = g.n_samples();
  const double dt = g.dt();
  Complex acc(0.0, 0.0);
  for (int s = 0; s < n; ++s) {
    const double q = (s == 0 || s == n - 1) ? 0.5 : 1.0;
    const double wgt = q * std::exp(-2.0 * u.rho * g.time(s)) * dt;
    acc += wgt * std::conj(window(s)) * chi.dot(u.values.col(s)) * h;
  }
  return acc;
}

}  // namespace

CoefficientFamily::CoefficientFamily(std::string name, std::function<double(double)> profile,
                                     double alpha_c, double sup_norm,
                                     std::vector<double> breakpoints)
    : name_(std::move(name)), profile_(std::move(profile)), alpha_c_(alpha_c),
      sup_norm_(sup_norm), breakpoints_(std::move(breakpoints)) {
  if (!(alpha_c_ > 0.0)) throw ContractViolation("CoefficientFamily: alpha_c must be > 0");
  if (!(sup_norm_ >= alpha_c_))
    throw ContractViolation("CoefficientFamily: sup_norm must be >= alpha_c");
  std::sort(breakpoints_.begin(), breakpoints_.end());
  for (double b : breakpoints_)
    if (b < 0.0 || b >= 1.0)
      throw ContractViolation("CoefficientFamily: breakpoints must lie in [0,1)");
}

int CoefficientFamily::max_index(const SpaceGrid& grid, Axis axis) const {
  const int n_axis = axis == Axis::X ? grid.n_x() : grid.n_y();
  const double length = axis == Axis::X ? grid.length_x() : grid.length_y();
  // a_n has period 1/n; require >= 8 samples per period.
  return static_cast<int>(std::floor(n_axis / (8.0 * length)));
}

RealVec CoefficientFamily::sample(int n, const SpaceGrid& grid, Axis axis) const {
  if (n < 1) throw ContractViolation("CoefficientFamily::sample: index must be >= 1");
  if (axis == Axis::Y && !grid.has_y())
    throw ContractViolation("CoefficientFamily::sample: grid has no y axis");
  const int limit = max_index(grid, axis);
  if (n > limit) {
    std::ostringstream msg;
    msg << "CoefficientFamily::sample: index " << n << " leaves fewer than 8 samples per "
        << "oscillation period on this grid (max admissible " << limit << ")";
    throw ContractViolation(msg.str());
  }
  const int n_axis = axis == Axis::X ? grid.n_x() : grid.n_y();
  const double h = axis == Axis::X ? grid.h_x() : grid.h_y();
  RealVec v(n_axis);
  for (int i = 0; i < n_axis; ++i) v(i) = profile_(n * i * h);
  return v;
}

CoefficientFamily constant_family(double c) {
  if (c <= 0.0) throw ContractViolation("constant_family: c must be > 0");
  return CoefficientFamily("constant", [c](double) { return c; }, c, c);
}

CoefficientFamily two_plus_sine_family() {
  return CoefficientFamily(
      "two_plus_sine", [](double y) { return 2.0 + std::sin(2.0 * kPi * y); }, 1.0, 3.0);
}

CoefficientFamily custom_samples_family(std::vector<double> samples) {
  if (samples.size() < 2) throw ContractViolation("custom_samples_family: need >= 2 samples");
  double lo = samples[0], hi = samples[0];
  for (double s : samples) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  if (lo <= 0.0) throw ContractViolation("custom_samples_family: samples must be > 0");
  auto profile = [samples](double y) {
    const int m = static_cast<int>(samples.size());
    double frac = y - std::floor(y);
    const double pos = frac * m;
    const int i = std::min(static_cast<int>(pos), m - 1);
    const double w = pos - i;
    return (1.0 - w) * samples[i] + w * samples[(i + 1) % m];
  };
  std::vector<double> kinks;
  for (std::size_t i = 0; i < samples.size(); ++i)
    kinks.push_back(static_cast<double>(i) / samples.size());
  return CoefficientFamily("custom_samples", profile, lo, hi, std::move(kinks));
}

namespace {

double simpson_segments(const std::function<double(double)>& f,
                        const std::vector<double>& edges, int cells_per_segment) {
  // composite Simpson over [0,1], split at the segment edges
  double acc = 0.0;
  for (std::size_t seg = 0; seg + 1 < edges.size(); ++seg) {
    const double lo = edges[seg];
    const double len = edges[seg + 1] - lo;
    if (len <= 0.0) continue;
    const double h = len / cells_per_segment;
    for (int i = 0; i < cells_per_segment; ++i) {
      const double a = lo + i * h;
      acc += (h / 6.0) * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
    }
  }
  return acc;
}

double converged_mean(const std::function<double(double)>& f,
                      const std::vector<double>& breakpoints, double tol) {
  std::vector<double> edges{0.0};
  for (double b : breakpoints)
    if (b > 0.0 && b < 1.0) edges.push_back(b);
  edges.push_back(1.0);
  int cells = 16;
  double prev = simpson_segments(f, edges, cells);
  for (int level = 0; level < 12; ++level) {
    cells *= 2;
    const double cur = simpson_segments(f, edges, cells);
    if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw NumericalError("periodic_moments: quadrature did not converge", std::abs(prev));
}

}  // namespace

MomentTable periodic_moments(const CoefficientFamily& family, int k_max, double tol) {
  if (k_max < 1) throw ContractViolation("periodic_moments: k_max must be >= 1");
  MomentTable table;
  table.k_max = k_max;
  table.kappa = family.sup_norm() + 1.0;
  for (int k = 1; k <= k_max; ++k) {
    table.b.push_back(converged_mean(
        [&family, k](double y) { return std::pow(family.profile(y), k); },
        family.breakpoints(), tol));
  }
  table.b_inv = converged_mean([&family](double y) { return 1.0 / family.profile(y); },
                               family.breakpoints(), tol);
  return table;
}

TestSet make_test_set(int n_points, double length, std::uint64_t seed) {
  TestSet set;
  const double h = length / n_points;
  const struct {
    double c, w;
  } gaussians[12] = {{0.20, 0.05}, {0.35, 0.10}, {0.50, 0.05}, {0.50, 0.15},
                     {0.65, 0.08}, {0.80, 0.05}, {0.30, 0.20}, {0.70, 0.20},
                     {0.45, 0.03}, {0.55, 0.07}, {0.25, 0.12}, {0.75, 0.10}};
  for (int g = 0; g < 12; ++g) {
    RealVec v = gaussian_profile(n_points, length, gaussians[g].c * length,
                                 gaussians[g].w * length);
    set.vectors.push_back(normalized(v.cast<Complex>(), h));
    std::ostringstream id;
    id << "gauss_" << g;
    set.ids.push_back(id.str());
  }
  const struct {
    double a, b;
  } boxes[4] = {{0.2, 0.4}, {0.4, 0.6}, {0.6, 0.8}, {0.3, 0.7}};
  for (int i = 0; i < 4; ++i) {
    RealVec v = indicator_profile(n_points, length, boxes[i].a * length, boxes[i].b * length);
    set.vectors.push_back(normalized(v.cast<Complex>(), h));
    std::ostringstream id;
    id << "indicator_" << i;
    set.ids.push_back(id.str());
  }
  Rng rng(seed);
  for (int r = 0; r < 8; ++r) {
    RealVec v = bandlimited_random(n_points, 24, rng);
    set.vectors.push_back(normalized(v.cast<Complex>(), h));
    std::ostringstream id;
    id << "random_" << r;
    set.ids.push_back(id.str());
  }
  return set;
}

GConvergenceReport static_criterion(const std::vector<SequenceEntry>& laws,
                                    const SpatialOperator& A, double rho, const Vec& psi,
                                    const TestSet& tests, double cell_measure,
                                    const MaterialLaw* limit_law, const LawCertificate* limit_cert,
                                    double tolerance) {
  if (laws.empty()) throw ContractViolation("static_criterion: empty law sequence");
  GConvergenceReport report;
  report.test_ids = tests.ids;
  const int cols = tests.size();
  report.pairings.resize(static_cast<long>(laws.size()), cols);
  for (const SequenceEntry& entry : laws) {
    if (!entry.cert.wp_verdict)
      throw ContractViolation("static_criterion: law at index " + std::to_string(entry.index) +
                              " is not certified");
    report.n_list.push_back(entry.index);
  }
  for (std::size_t i = 0; i < laws.size(); ++i) {
    const SequenceEntry& entry = laws[i];
    const SpatialOperator C = operator_scale(Complex(rho, 0.0), entry.law.eval(Complex(rho, 0.0)));
    const Vec phi = resolvent_solve(C, A, psi, entry.cert.alpha);
    for (int j = 0; j < cols; ++j)
      report.pairings(static_cast<long>(i), j) = tests.vectors[j].dot(phi) * cell_measure;
  }
  if (limit_law != nullptr) {
    const double alpha = limit_cert != nullptr ? limit_cert->alpha : limit_law->alpha();
    const SpatialOperator C =
        operator_scale(Complex(rho, 0.0), limit_law->eval(Complex(rho, 0.0)));
    const Vec phi = resolvent_solve(C, A, psi, alpha);
    report.limit_pairings.resize(cols);
    for (int j = 0; j < cols; ++j)
      report.limit_pairings(j) = tests.vectors[j].dot(phi) * cell_measure;
  }
  finalize_report(report, tolerance);
  return report;
}

Vec longitudinal_exact(const std::function<double(double)>& a, double rho,
                       const std::function<double(double)>& psi, const RealVec& eval_points,
                       double x_start, int fine_per_cell) {
  if (fine_per_cell < 1) throw ContractViolation("longitudinal_exact: fine_per_cell >= 1");
  const int m = static_cast<int>(eval_points.size());
  Vec out(m);
  double phi = 0.0;
  double x = x_start;
  auto inv_a = [&a](double s) {
    const double v = a(s);
    if (v <= 0.0) throw ContractViolation("longitudinal_exact: coefficient must stay > 0");
    return 1.0 / v;
  };
  // Substep length derived from the evaluation spacing.
  const double span = m >= 2 ? eval_points(m - 1) - eval_points(0) : 1.0;
  const double h_sub = span > 0.0 ? span / ((m >= 2 ? m - 1 : 1) * fine_per_cell) : 1.0;
  for (int p = 0; p < m; ++p) {
    const double target = eval_points(p);
    if (target < x)
      throw ContractViolation("longitudinal_exact: eval_points must be nondecreasing");
    if (target == x) {
      out(p) = phi;
      continue;
    }
    const int steps = std::max(1, static_cast<int>(std::ceil((target - x) / h_sub)));
    const double hh = (target - x) / steps;
    for (int s = 0; s < steps; ++s) {
      const double x0 = x + s * hh;
      const double x1 = x0 + hh;
      const double xm = 0.5 * (x0 + x1);
      // Simpson values of int_xi^{x1} 1/a for xi = x0, xm, x1
      const double w_full =
          (hh / 6.0) * (inv_a(x0) + 4.0 * inv_a(xm) + inv_a(x1));
      const double w_half =
          (0.5 * hh / 6.0) * (inv_a(xm) + 4.0 * inv_a(0.5 * (xm + x1)) + inv_a(x1));
      // phi(x1) = e^{-rho W} phi(x0) + int_{x0}^{x1} e^{-rho int_xi^{x1} 1/a} psi(xi) dxi
      const double i0 = std::exp(-rho * w_full) * psi(x0);
      const double im = std::exp(-rho * w_half) * psi(xm);
      const double i1 = psi(x1);
      phi = std::exp(-rho * w_full) * phi + (hh / 6.0) * (i0 + 4.0 * im + i1);
    }
    x = target;
    out(p) = phi;
  }
  return out;
}

namespace {

// S_z = (z + A_x)^{-1} as a dense matrix.
Mat resolvent_of_shift(const SpatialOperator& A_x, Complex z) {
  const int d = A_x.dim;
  Mat m = A_x.matrix;
  m.diagonal().array() += z;
  return m.partialPivLu().solve(Mat::Identity(d, d));
}

Mat neumann_T(const MomentTable& moments, const Mat& S, int K) {
  const int d = static_cast<int>(S.rows());
  Mat T = Mat::Zero(d, d);
  Mat P = Mat::Identity(d, d);  // (-S)^{k-1}
  for (int k = 1; k <= K; ++k) {
    T += moments.b[static_cast<std::size_t>(k - 1)] * P;
    if (k < K) P = -S * P;
  }
  return T;
}

Mat neumann_eval(const MomentTable& moments, const SpatialOperator& A_x, Complex z, int K,
                 int L) {
  const Mat S = resolvent_of_shift(A_x, z);
  const Mat T = neumann_T(moments, S, K);
  Mat acc = T;
  Mat term = T;  // S^{l-1} T^l, built incrementally
  for (int l = 2; l <= L; ++l) {
    term = S * T * term;
    acc += term;
  }
  Mat m = acc / z;
  m.diagonal().array() += 1.0;
  return m;
}

}  // namespace

MaterialLaw neumann_limit_law(const MomentTable& moments, const SpatialOperator& A_x,
                              double rho, int K, int L) {
  if (!(rho > 4.0 * moments.kappa)) {
    std::ostringstream msg;
    msg << "neumann_limit_law: rho = " << rho << " must exceed 4*kappa = "
        << 4.0 * moments.kappa << " for the series bound";
    throw ContractViolation(msg.str());
  }
  if (K < 2 || L < 2) throw ContractViolation("neumann_limit_law: K and L must be >= 2");
  if (moments.k_max < K)
    throw ContractViolation("neumann_limit_law: moment table too short for K");
  if (!A_x.tags.skew_adjoint)
    throw ContractViolation("neumann_limit_law: A_x must be tagged skew_adjoint");
  // Uniform bound on ||M_trunc(z) - M_full(z)|| over the line Re z = rho:
  // the z^{-1} prefactor cancels the one power of rho in each series bound.
  const double q = moments.kappa / rho;  // <= 1/4
  const double tail_first = std::pow(q, K + 1) / (1.0 - q);
  const double tail_second = std::pow(1.0 / 3.0, L + 1) / (2.0 / 3.0);
  MomentTable m = moments;
  SpatialOperator a = A_x;
  MaterialLaw law(LawKind::NeumannLimit, "neumann_limit", A_x.dim, 4.0 * moments.kappa, 1.0,
                  [m, a, K, L](Complex z) {
                    return SpatialOperator::dense(neumann_eval(m, a, z, K, L));
                  });
  law.set_truncation_tail(tail_first + tail_second);
  return law;
}

std::vector<double> neumann_partial_sum_norms(const MomentTable& moments,
                                              const SpatialOperator& A_x, Complex z, int K) {
  if (moments.k_max < K)
    throw ContractViolation("neumann_partial_sum_norms: moment table too short");
  const Mat S = resolvent_of_shift(A_x, z);
  const int d = A_x.dim;
  Mat P = Mat::Identity(d, d);
  Mat acc = Mat::Zero(d, d);
  std::vector<double> norms;
  for (int k = 1; k <= K; ++k) {
    P = -S * P;  // (-S)^k
    acc += moments.b[static_cast<std::size_t>(k - 1)] * P;
    norms.push_back(operator_norm(acc));
  }
  return norms;
}

namespace {

WeightedSignal separable_signal(const TimeGrid& tg, double rho, const RealVec& envelope,
                                const Vec& space_part) {
  Mat values(space_part.size(), tg.n_samples());
  for (int s = 0; s < tg.n_samples(); ++s) values.col(s) = envelope(s) * space_part;
  return WeightedSignal(tg, std::move(values), rho);
}

struct SpaceTimeTests {
  std::vector<Vec> windows;  // rho-normalized time windows
  std::vector<Vec> spatial;  // unit-normalized spatial tests
  std::vector<std::string> ids;
};

SpaceTimeTests make_space_time_tests(const TimeGrid& tg, double rho, const TestSet& spatial,
                                     const std::vector<int>& spatial_subset) {
  SpaceTimeTests out;
  const double t0 = tg.t_min();
  const double span = tg.duration();
  const struct {
    double c, w;
  } wins[3] = {{t0 + 0.44 * span, 0.06 * span},
               {t0 + 0.56 * span, 0.09 * span},
               {t0 + 0.50 * span, 0.045 * span}};
  std::vector<Vec> windows;
  for (const auto& wdef : wins) windows.push_back(time_window(tg, rho, wdef.c, wdef.w));
  for (std::size_t wi = 0; wi < windows.size(); ++wi) {
    for (int j : spatial_subset) {
      out.windows.push_back(windows[wi]);
      out.spatial.push_back(spatial.vectors[static_cast<std::size_t>(j)]);
      std::ostringstream id;
      id << "t" << wi << "_x_" << spatial.ids[static_cast<std::size_t>(j)];
      out.ids.push_back(id.str());
    }
  }
  return out;
}

std::vector<int> default_subset(const TestSet& set, int n_gauss, int n_ind, int n_rand) {
  std::vector<int> subset;
  for (int i = 0; i < n_gauss; ++i) subset.push_back(i);
  for (int i = 0; i < n_ind; ++i) subset.push_back(12 + i);
  for (int i = 0; i < n_rand; ++i) subset.push_back(16 + i);
  (void)set;
  return subset;
}

}  // namespace

LongitudinalResult longitudinal_experiment(const CoefficientFamily& family,
                                           const LongitudinalConfig& config) {
  if (config.grid.has_y())
    throw ContractViolation("longitudinal_experiment: grid must be one-dimensional");
  if (!(config.rho > 0.0)) throw ContractViolation("longitudinal_experiment: rho must be > 0");

  LongitudinalResult result;
  result.moments = periodic_moments(family, 2);
  const SpaceGrid& grid = config.grid;
  const double hx = grid.h_x();
  const double rho = config.rho;
  const SpatialOperator A = periodic_derivative(grid, Axis::X);
  const double xi_max = config.time_grid.nyquist();
  const double nu = 0.5 * rho;

  const TestSet tests = make_test_set(grid.n_x(), grid.length_x(), config.seed);
  const Vec psi = normalized(
      gaussian_profile(grid.n_x(), grid.length_x(), config.psi_center, config.psi_width)
          .cast<Complex>(),
      hx);

  // Prelimit laws M_n(z) = a_n^{-1} with the per-line constant alpha = rho * min(1/a_n).
  std::vector<SequenceEntry> entries;
  std::vector<RealVec> samples;
  for (int n : config.n_list) {
    RealVec a_n = family.sample(n, grid, Axis::X);
    const double alpha = rho * a_n.cwiseInverse().minCoeff();
    MaterialLaw law = reciprocal_coefficient_law(a_n, nu, alpha);
    LawCertificate cert = certify_accretivity(law, {rho}, config.cert_n_freq, xi_max);
    entries.push_back(SequenceEntry{n, std::move(law), std::move(cert)});
    samples.push_back(std::move(a_n));
  }

  // Candidate limit law M(z) = b_inv * I.
  const double b_inv = result.moments.b_inv;
  MaterialLaw limit_law =
      constant_law(grid.n_x(), Complex(b_inv, 0.0), nu, rho * b_inv);
  LawCertificate limit_cert = certify_accretivity(limit_law, {rho}, config.cert_n_freq, xi_max);

  result.static_report = static_criterion(entries, A, rho, psi, tests, hx, &limit_law,
                                          &limit_cert, config.static_tolerance);

  // Dynamic path: full space-time solves paired against space-time tests.
  RealVec env(config.time_grid.n_samples());
  for (int s = 0; s < config.time_grid.n_samples(); ++s)
    env(s) = std::exp(
        -std::pow((config.time_grid.time(s) - config.f_time_center) / config.f_time_width, 2));
  const WeightedSignal f = separable_signal(config.time_grid, rho, env, psi);
  const double f_norm = weighted_norm(f);
  const SpaceTimeTests st = make_space_time_tests(config.time_grid, rho, tests,
                                                  default_subset(tests, 6, 2, 2));

  GConvergenceReport dyn;
  dyn.test_ids = st.ids;
  dyn.pairings.resize(static_cast<long>(entries.size()), static_cast<long>(st.ids.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto [u, rep] = solve(entries[i].law, A, f, entries[i].cert);
    result.dynamic_reports.push_back(rep);
    dyn.n_list.push_back(entries[i].index);
    for (std::size_t j = 0; j < st.ids.size(); ++j)
      dyn.pairings(static_cast<long>(i), static_cast<long>(j)) =
          space_time_pairing(st.windows[j], st.spatial[j], u, hx) / f_norm;
  }
  auto [u_lim, rep_lim] = solve(limit_law, A, f, limit_cert);
  dyn.limit_pairings.resize(static_cast<long>(st.ids.size()));
  for (std::size_t j = 0; j < st.ids.size(); ++j)
    dyn.limit_pairings(static_cast<long>(j)) =
        space_time_pairing(st.windows[j], st.spatial[j], u_lim, hx) / f_norm;
  finalize_report(dyn, config.dynamic_tolerance);
  result.dynamic_report = std::move(dyn);

  // Whole-line quadrature formula as an independent route to the limit at a
  // high-decay line (periodic wrap of the kernel must be negligible there).
  {
    const double rho_o = config.exact_oracle_rho;
    const int n_o = config.exact_oracle_index;
    result.exact_oracle_index = n_o;
    // Integer oscillation counts integrate 1/a to exactly b_inv per cell,
    // so wrap images of the whole-line kernel decay with the mean.
    result.wrap_bound = std::exp(-rho_o * grid.length_x() * result.moments.b_inv);
    RealVec points(grid.n_x());
    for (int i = 0; i < grid.n_x(); ++i) points(i) = grid.x(i);
    auto a_fn = [&family, n_o](double x) { return family.profile(n_o * x); };
    auto psi_fn = [&config](double x) {
      return std::exp(-std::pow((x - config.psi_center) / config.psi_width, 2));
    };
    const double psi_scale =
        grid_norm(gaussian_profile(grid.n_x(), grid.length_x(), config.psi_center,
                                   config.psi_width)
                      .cast<Complex>(),
                  hx);
    const int fine = std::max(
        16, static_cast<int>(std::ceil(8.0 * n_o * grid.length_x() / grid.n_x())));
    Vec phi_oracle =
        longitudinal_exact(a_fn, rho_o, psi_fn, points, grid.x(0), fine).cast<Complex>();
    phi_oracle /= psi_scale;
    const SpatialOperator C_lim =
        multiplication_operator(RealVec(RealVec::Constant(grid.n_x(), rho_o * b_inv)));
    const Vec phi_lim = resolvent_solve(C_lim, A, psi, rho_o * b_inv);
    double defect = 0.0;
    for (int j = 0; j < tests.size(); ++j)
      defect = std::max(defect,
                        std::abs(tests.vectors[j].dot(phi_oracle - phi_lim) * hx));
    result.exact_oracle_defect = defect;
  }

  // Closure shadow: the limit static operator against the prelimit constants.
  result.prelimit_alpha = rho / family.sup_norm();
  result.prelimit_beta = rho / family.alpha_c();
  const SpatialOperator C_limit =
      multiplication_operator(RealVec(RealVec::Constant(grid.n_x(), rho * b_inv)));
  result.limit_f_check =
      check_F_membership(C_limit, result.prelimit_alpha, result.prelimit_beta, 1e-8);

  // Linear growth bound of the computed limit law.
  std::vector<Complex> z_samples;
  for (double xi : log_spaced_frequencies(xi_max, config.cert_n_freq))
    z_samples.emplace_back(rho, xi);
  result.growth =
      linear_growth_bound_check(limit_law, 1.0 / family.alpha_c(), limit_law.alpha(), z_samples);
  result.limit_norm_sup = 0.0;
  for (double norm : result.growth.norms)
    result.limit_norm_sup = std::max(result.limit_norm_sup, norm);

  result.verdict = result.static_report.verdict && result.dynamic_report.verdict &&
                   result.limit_f_check.member && result.growth.verdict &&
                   result.exact_oracle_defect <= config.exact_oracle_tolerance;
  return result;
}

OrthogonalResult orthogonal_experiment(const CoefficientFamily& family,
                                       const OrthogonalConfig& config) {
  if (!config.grid.has_y())
    throw ContractViolation("orthogonal_experiment: grid must have a y axis");
  OrthogonalResult result;
  result.moments = periodic_moments(family, std::max(config.K, 2));
  const double kappa = result.moments.kappa;
  if (!(config.rho > 4.0 * kappa)) {
    std::ostringstream msg;
    msg << "orthogonal_experiment: rho = " << config.rho
        << " violates the series precondition rho > 4*kappa = " << 4.0 * kappa;
    throw ContractViolation(msg.str());
  }

  const SpaceGrid& grid = config.grid;
  const int nx = grid.n_x();
  const int ny = grid.n_y();
  const double hx = grid.h_x();
  const double hy = grid.h_y();
  const double rho = config.rho;
  const TimeGrid& tg = config.time_grid;
  const double xi_max = tg.nyquist();

  const SpaceGrid xline(grid.length_x(), nx);
  const SpatialOperator A_x = periodic_derivative(xline, Axis::X);

  // Sources and tests (all separable).
  RealVec env(tg.n_samples());
  for (int s = 0; s < tg.n_samples(); ++s)
    env(s) = std::exp(-std::pow((tg.time(s) - config.f_time_center) / config.f_time_width, 2));
  const Vec fx = gaussian_profile(nx, grid.length_x(), config.fx_center, config.fx_width)
                     .cast<Complex>();
  RealVec fy(ny);
  for (int j = 0; j < ny; ++j)
    fy(j) = std::exp(-std::pow((grid.y(j) - config.fy_center) / config.fy_width, 2));

  const WeightedSignal f_base = separable_signal(tg, rho, env, fx);
  const double f_norm =
      weighted_norm(f_base) * std::sqrt(fy.squaredNorm() * hy);

  const TestSet x_tests = make_test_set(nx, grid.length_x(), config.seed);
  const TestSet y_tests_raw = make_test_set(ny, grid.length_y(), config.seed + 1);
  std::vector<Vec> y_tests;
  std::vector<std::string> y_ids;
  y_tests.push_back(normalized(Vec::Constant(ny, Complex(1.0, 0.0)), hy));
  y_ids.push_back("const");
  for (int j : {0, 2, 12, 13, 16}) {
    y_tests.push_back(y_tests_raw.vectors[static_cast<std::size_t>(j)]);
    y_ids.push_back(y_tests_raw.ids[static_cast<std::size_t>(j)]);
  }
  const SpaceTimeTests st =
      make_space_time_tests(tg, rho, x_tests, default_subset(x_tests, 2, 1, 1));

  // Pairing ids: (time x x-test) x y-test.
  std::vector<std::string> pair_ids;
  for (const std::string& sx : st.ids)
    for (const std::string& sy : y_ids) pair_ids.push_back(sx + "_y_" + sy);

  // Static test ids: x-test x y-test (subset).
  const std::vector<int> x_static_subset = default_subset(x_tests, 3, 2, 1);
  std::vector<std::string> static_ids;
  for (int jx : x_static_subset)
    for (const std::string& sy : y_ids)
      static_ids.push_back(x_tests.ids[static_cast<std::size_t>(jx)] + "_y_" + sy);

  const Vec psi_x = normalized(fx, hx);

  // Limit law from the truncated Neumann series.
  MaterialLaw limit_law = neumann_limit_law(result.moments, A_x, rho, config.K, config.L);
  LawCertificate limit_cert = certify_accretivity(limit_law, {rho}, config.cert_n_freq, xi_max);

  GConvergenceReport dyn;
  dyn.test_ids = pair_ids;
  dyn.pairings.resize(static_cast<long>(config.n_list.size()),
                      static_cast<long>(pair_ids.size()));
  GConvergenceReport stat;
  stat.test_ids = static_ids;
  stat.pairings.resize(static_cast<long>(config.n_list.size()),
                       static_cast<long>(static_ids.size()));

  // Prelimit solves, slice by slice.
  for (std::size_t ni = 0; ni < config.n_list.size(); ++ni) {
    const int n = config.n_list[ni];
    const RealVec a_y = family.sample(n, grid, Axis::Y);
    Mat slice_xpairs = Mat::Zero(static_cast<long>(st.ids.size()), ny);
    Mat slice_static = Mat::Zero(static_cast<long>(x_static_subset.size()), ny);
    SolveReport worst_rep;
    std::mutex rep_mutex;
    parallel_for(static_cast<std::size_t>(ny), [&](std::size_t j) {
      const double a_j = a_y(static_cast<long>(j));
      MaterialLaw law = shifted_coefficient_law(RealVec::Constant(nx, a_j));
      LawCertificate cert = certify_accretivity(law, {rho}, config.cert_n_freq, xi_max);
      // dynamic slice solve with RHS scaled by fy_j
      WeightedSignal f_j = f_base;
      f_j.values *= fy(static_cast<long>(j));
      auto [u_j, rep] = solve(law, A_x, f_j, cert);
      for (std::size_t p = 0; p < st.ids.size(); ++p)
        slice_xpairs(static_cast<long>(p), static_cast<long>(j)) =
            space_time_pairing(st.windows[p], st.spatial[p], u_j, hx);
      // static slice solve
      const SpatialOperator C =
          operator_scale(Complex(rho, 0.0), law.eval(Complex(rho, 0.0)));
      const Vec phi_j = resolvent_solve(C, A_x, Vec(psi_x * fy(static_cast<long>(j))), cert.alpha);
      for (std::size_t p = 0; p < x_static_subset.size(); ++p)
        slice_static(static_cast<long>(p), static_cast<long>(j)) =
            x_tests.vectors[static_cast<std::size_t>(x_static_subset[p])].dot(phi_j) * hx;
      std::lock_guard<std::mutex> lock(rep_mutex);
      worst_rep.residual = std::max(worst_rep.residual, rep.residual);
      worst_rep.norm_ratio = std::max(worst_rep.norm_ratio, rep.norm_ratio);
      worst_rep.alpha_used = rep.alpha_used;
      worst_rep.boundary_leakage = std::max(worst_rep.boundary_leakage, rep.boundary_leakage);
    });
    result.dynamic_reports.push_back(worst_rep);
    dyn.n_list.push_back(n);
    stat.n_list.push_back(n);
    long col = 0;
    for (std::size_t p = 0; p < st.ids.size(); ++p)
      for (const Vec& ytest : y_tests)
        dyn.pairings(static_cast<long>(ni), col++) =
            (ytest.adjoint() * slice_xpairs.row(static_cast<long>(p)).transpose())(0) * hy /
            f_norm;
    col = 0;
    for (std::size_t p = 0; p < x_static_subset.size(); ++p)
      for (const Vec& ytest : y_tests)
        stat.pairings(static_cast<long>(ni), col++) =
            (ytest.adjoint() * slice_static.row(static_cast<long>(p)).transpose())(0) * hy;
  }

  // Limit solves: the law is identical across slices and the source is
  // separable, so one x-line solve per path suffices.
  {
    auto [u_base, rep] = solve(limit_law, A_x, f_base, limit_cert);
    dyn.limit_pairings.resize(static_cast<long>(pair_ids.size()));
    long col = 0;
    for (std::size_t p = 0; p < st.ids.size(); ++p) {
      const Complex base_pair = space_time_pairing(st.windows[p], st.spatial[p], u_base, hx);
      for (const Vec& ytest : y_tests) {
        const Complex y_pair = (ytest.adjoint() * fy.cast<Complex>())(0) * hy;
        dyn.limit_pairings(col++) = base_pair * y_pair / f_norm;
      }
    }

    const SpatialOperator C_lim =
        operator_scale(Complex(rho, 0.0), limit_law.eval(Complex(rho, 0.0)));
    const Vec phi_base = resolvent_solve(C_lim, A_x, psi_x, limit_cert.alpha);
    stat.limit_pairings.resize(static_cast<long>(static_ids.size()));
    long scol = 0;
    for (std::size_t p = 0; p < x_static_subset.size(); ++p) {
      const Complex base_pair =
          x_tests.vectors[static_cast<std::size_t>(x_static_subset[p])].dot(phi_base) * hx;
      for (const Vec& ytest : y_tests) {
        const Complex y_pair = (ytest.adjoint() * fy.cast<Complex>())(0) * hy;
        stat.limit_pairings(scol++) = base_pair * y_pair;
      }
    }
  }
  finalize_report(dyn, config.dynamic_tolerance);
  finalize_report(stat, config.static_tolerance);
  result.dynamic_report = std::move(dyn);
  result.static_report = std::move(stat);

  // Tail bound of the first Neumann series over sampled z on the line.
  result.tail_bound_ok = true;
  result.max_partial_sum_norm = 0.0;
  for (double xi : log_spaced_frequencies(xi_max, 9)) {
    const auto norms = neumann_partial_sum_norms(result.moments, A_x, Complex(rho, xi),
                                                 std::min(config.K, result.moments.k_max));
    for (double v : norms) {
      result.max_partial_sum_norm = std::max(result.max_partial_sum_norm, v);
      if (kappa / rho <= 0.25 && v > 1.0 / 3.0 + 1e-9) result.tail_bound_ok = false;
    }
  }

  // Truncation-order sensitivity: K vs K/2 against the geometric tail.
  {
    const int k_lo = std::max(2, config.K / 2);
    const double q = kappa / rho;
    result.k_sensitivity_bound = std::pow(q, k_lo + 1) / (1.0 - q);
    MaterialLaw law_lo = neumann_limit_law(result.moments, A_x, rho, k_lo, config.L);
    double worst = 0.0;
    for (double xi : {0.0, xi_max / 8.0, xi_max}) {
      const Complex z(rho, xi);
      worst = std::max(worst,
                       operator_norm(limit_law.eval(z).matrix - law_lo.eval(z).matrix));
    }
    result.k_sensitivity = worst;
  }

  // Growth bound of the computed limit law with the line sup of the prelimit laws.
  std::vector<Complex> z_samples;
  for (double xi : log_spaced_frequencies(xi_max, config.cert_n_freq))
    z_samples.emplace_back(rho, xi);
  const double sup_bound = 1.0 + family.sup_norm() / rho;
  result.growth = linear_growth_bound_check(limit_law, sup_bound, limit_law.alpha(), z_samples);

  // Closure shadow at z = rho with the prelimit constants of thm-style
  // beta(z)/alpha = |z|^2 sup_n ||M_n(z)||^2 / alpha.
  result.prelimit_alpha = 1.0;
  result.prelimit_beta = rho * rho * sup_bound * sup_bound / result.prelimit_alpha;
  result.limit_f_check = check_F_membership(
      operator_scale(Complex(rho, 0.0), limit_law.eval(Complex(rho, 0.0))),
      result.prelimit_alpha, result.prelimit_beta, 1e-8);

  result.verdict = result.dynamic_report.verdict && result.static_report.verdict &&
                   result.tail_bound_ok &&
                   result.k_sensitivity <= result.k_sensitivity_bound + 1e-12 &&
                   result.growth.verdict && result.limit_f_check.member;
  return result;
}

ConstantProfileCheck constant_profile_check(double c, const SpaceGrid& grid,
                                            const TimeGrid& time_grid, double rho, int K,
                                            int L) {
  ConstantProfileCheck out;
  const CoefficientFamily family = constant_family(c);
  const MomentTable moments = periodic_moments(family, std::max(K, 2));
  const SpaceGrid xline(grid.length_x(), grid.n_x());
  const SpatialOperator A_x = periodic_derivative(xline, Axis::X);
  MaterialLaw neumann = neumann_limit_law(moments, A_x, rho, K, L);
  MaterialLaw shifted = shifted_coefficient_law(RealVec::Constant(grid.n_x(), c));

  const double q_first = c / rho;
  const double q_outer = (c / rho) / (1.0 - c / rho);  // ||S T|| for constant c
  out.tail = std::pow(q_first, K + 1) / (1.0 - q_first) +
             std::pow(q_outer, L + 1) / (1.0 - q_outer);

  const double xi_max = time_grid.nyquist();
  double law_gap = 0.0;
  for (double xi : {0.0, xi_max / 16.0, xi_max / 2.0, xi_max}) {
    const Complex z(rho, xi);
    law_gap =
        std::max(law_gap, operator_norm(neumann.eval(z).matrix - shifted.eval(z).matrix));
  }
  out.law_discrepancy = law_gap;

  RealVec env(time_grid.n_samples());
  for (int s = 0; s < time_grid.n_samples(); ++s) {
    const double t0 = time_grid.t_min() + 0.3 * time_grid.duration();
    env(s) = std::exp(-std::pow((time_grid.time(s) - t0) / (0.06 * time_grid.duration()), 2));
  }
  const Vec fx =
      gaussian_profile(grid.n_x(), grid.length_x(), 0.4 * grid.length_x(),
                       0.08 * grid.length_x())
          .cast<Complex>();
  const WeightedSignal f = separable_signal(time_grid, rho, env, normalized(fx, grid.h_x()));
  LawCertificate cert_n = certify_accretivity(neumann, {rho}, 15, xi_max);
  LawCertificate cert_s = certify_accretivity(shifted, {rho}, 15, xi_max);
  auto [u_n, rep_n] = solve(neumann, A_x, f, cert_n);
  auto [u_s, rep_s] = solve(shifted, A_x, f, cert_s);
  WeightedSignal diff(u_n.grid, u_n.values - u_s.values, u_n.rho);
  const double fn = weighted_norm(f);
  out.solve_discrepancy = weighted_norm(diff) / fn;
  // Resolvent identity: N1(z) - N2(z) = -N1(z) z(M1 - M2)(z) N2(z), and
  // ||z (M1 - M2)(z)|| <= rho * tail uniformly on the line, so the solve
  // gap is bounded by rho * tail / alpha^2 with alpha = 1 here.
  const double slack = 4.0;
  out.ok = out.law_discrepancy <= out.tail * (1.0 + 1e-9) &&
           out.solve_discrepancy <= slack * rho * out.tail;
  return out;
}

double orthogonal_causality_defect(const RealVec& a_slices, const SpatialOperator& A_x,
                                   const TimeGrid& time_grid, double rho,
                                   const SeparableSource& source, double y_measure,
                                   double a_cut, int cert_n_freq) {
  const int ny = static_cast<int>(a_slices.size());
  const int nx = A_x.dim;
  if (source.x_profile.size() != nx)
    throw ContractViolation("orthogonal_causality_defect: x profile size mismatch");
  if (source.y_profile.size() != ny)
    throw ContractViolation("orthogonal_causality_defect: y profile size mismatch");
  const double xi_max = time_grid.nyquist();
  std::vector<double> num2(ny, 0.0), den2(ny, 0.0);
  parallel_for(static_cast<std::size_t>(ny), [&](std::size_t j) {
    MaterialLaw law =
        shifted_coefficient_law(RealVec::Constant(nx, a_slices(static_cast<long>(j))));
    LawCertificate cert = certify_accretivity(law, {rho}, cert_n_freq, xi_max);
    WeightedSignal f_j = separable_signal(time_grid, rho, source.time_envelope,
                                          source.x_profile.cast<Complex>());
    f_j.values *= source.y_profile(static_cast<long>(j));
    auto [u_full, rep1] = solve(law, A_x, f_j, cert);
    auto [u_trunc, rep2] = solve(law, A_x, truncate_before(f_j, a_cut), cert);
    WeightedSignal diff(u_full.grid, u_full.values - u_trunc.values, u_full.rho);
    const double n = weighted_norm(truncate_before(diff, a_cut));
    const double d = weighted_norm(f_j);
    num2[j] = n * n;
    den2[j] = d * d;
  });
  double num = 0.0, den = 0.0;
  for (int j = 0; j < ny; ++j) {
    num += num2[static_cast<std::size_t>(j)] * y_measure;
    den += den2[static_cast<std::size_t>(j)] * y_measure;
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

}  // namespace evolab

