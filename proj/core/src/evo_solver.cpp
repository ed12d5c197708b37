#include "evolab/evo_solver.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <vector>

namespace evolab {

namespace {

void require_certificate(const MaterialLaw& law, const WeightedSignal& f,
                         const LawCertificate& cert) {
  if (cert.law_name != law.name())
    throw ContractViolation("solve: certificate was issued for law '" + cert.law_name +
                            "', not '" + law.name() + "'");
  if (!cert.wp_verdict)
    throw ContractViolation("solve: certificate verdict is negative for law '" + law.name() +
                            "'");
  if (!cert.covers(f.rho, f.grid.nyquist())) {
    std::ostringstream msg;
    msg << "solve: certificate does not cover the line Re z = " << f.rho
        << " up to the Nyquist frequency " << f.grid.nyquist();
    throw ContractViolation(msg.str());
  }
}

}  // namespace

std::pair<WeightedSignal, SolveReport> solve(const MaterialLaw& law, const SpatialOperator& A,
                                             const WeightedSignal& f,
                                             const LawCertificate& cert) {
  if (!(f.rho > law.nu()))
    throw ContractViolation("solve: f.rho must exceed the law abscissa nu");
  if (!A.tags.skew_adjoint) throw ContractViolation("solve: A must be tagged skew_adjoint");
  if (f.dim() != law.dim() || f.dim() != A.dim)
    throw ContractViolation("solve: dimension mismatch");
  require_certificate(law, f, cert);

  const Spectrum F = fourier_laplace(f);
  const int n = F.grid.n_samples();
  Mat U(f.dim(), n);
  std::vector<double> residuals(n, 0.0);

  std::exception_ptr solve_error;
  std::atomic<bool> failed{false};
  std::mutex err_mutex;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
    if (failed.load(std::memory_order_relaxed)) return;
    try {
      const Complex z = F.z(static_cast<int>(k));
      const SpatialOperator m = law.eval(z);
      const SpatialOperator zm = operator_scale(z, m);
      const ResolventSolver solver(zm, A, law.alpha());
      const Vec rhs = F.coeffs.col(static_cast<long>(k));
      const Vec u = solver.solve(rhs);
      U.col(static_cast<long>(k)) = u;
      const double rhs_norm = rhs.norm();
      if (rhs_norm > 0.0)
        residuals[k] = (solver.system_matrix() * u - rhs).norm() / rhs_norm;
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (!solve_error) {
        solve_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  });
  if (solve_error) {
    try {
      std::rethrow_exception(solve_error);
    } catch (const std::exception& e) {
      throw NumericalError(std::string("solve: per-frequency solve failed: ") + e.what(), 0.0);
    }
  }

  WeightedSignal u = inverse_fourier_laplace(Spectrum{F.grid, std::move(U), F.rho});
  SolveReport report;
  report.alpha_used = cert.alpha;
  for (double r : residuals) report.residual = std::max(report.residual, r);
  const double fn = weighted_norm(f);
  report.norm_ratio = fn > 0.0 ? weighted_norm(u) / fn : 0.0;
  report.boundary_leakage = std::max(boundary_leakage(f), boundary_leakage(u));
  return {std::move(u), report};
}

double check_causality(const MaterialLaw& law, const SpatialOperator& A,
                       const WeightedSignal& f, double a_cut, const LawCertificate& cert) {
  if (!(a_cut > f.grid.t_min() && a_cut < f.grid.t_max()))
    throw ContractViolation("check_causality: a_cut must be inside the grid");
  auto [u_full, rep_full] = solve(law, A, f, cert);
  auto [u_trunc, rep_trunc] = solve(law, A, truncate_before(f, a_cut), cert);
  WeightedSignal diff(u_full.grid, u_full.values - u_trunc.values, u_full.rho);
  const double fn = weighted_norm(f);
  return fn > 0.0 ? weighted_norm(truncate_before(diff, a_cut)) / fn : 0.0;
}

double check_autonomy(const MaterialLaw& law, const SpatialOperator& A, const WeightedSignal& f,
                      double h, const LawCertificate& cert) {
  auto [u, rep] = solve(law, A, f, cert);
  const WeightedSignal shifted_f = time_shift(f, h);
  auto [u_of_shifted, rep2] = solve(law, A, shifted_f, cert);
  const WeightedSignal shifted_u = time_shift(u, h);
  WeightedSignal diff(u.grid, shifted_u.values - u_of_shifted.values, u.rho);
  const double scale = weighted_norm(shifted_f);
  return scale > 0.0 ? weighted_norm(diff) / scale : 0.0;
}

double check_rho_consistency(const MaterialLaw& law, const SpatialOperator& A,
                             const WeightedSignal& f, double rho2, const LawCertificate& cert1,
                             const LawCertificate& cert2) {
  if (!(rho2 > law.nu()))
    throw ContractViolation("check_rho_consistency: rho2 must exceed the law abscissa nu");
  auto [u1, rep1] = solve(law, A, f, cert1);
  auto [u2, rep2] = solve(law, A, f.with_rho(rho2), cert2);
  const double rho_max = std::max(f.rho, rho2);
  const TimeGrid& g = f.grid;
  const double lo = g.t_min() + 0.25 * g.duration();
  const double hi = g.t_min() + 0.75 * g.duration();
  double worst = 0.0;
  double scale = 0.0;
  for (int s = 0; s < g.n_samples(); ++s) {
    const double w = std::exp(-rho_max * (g.time(s) - g.t_min()));
    scale = std::max(scale, w * u1.values.col(s).norm());
    if (g.time(s) < lo || g.time(s) > hi) continue;
    worst = std::max(worst, w * (u1.values.col(s) - u2.values.col(s)).norm());
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

}  // namespace evolab
