#pragma once

#include "evolab/material_law.hpp"
#include "evolab/space_ops.hpp"
#include "evolab/time_axis.hpp"

#include <optional>

namespace evolab {

struct SolveReport {
  double residual = 0.0;    // max over frequencies of the per-slot relative residual
  double norm_ratio = 0.0;  // ||u||_rho / ||f||_rho
  double alpha_used = 0.0;
  double boundary_leakage = 0.0;  // worst of input and output
  std::optional<double> causality_defect;
};

/// Picard solution operator: u with (z_k M(z_k) + A) u_hat(xi_k) = f_hat(xi_k)
/// per frequency, z_k = i xi_k + rho, assembled by the inverse transform.
/// The solver refuses to run unless the supplied certificate covers the
/// line Re z = f.rho up to the grid Nyquist frequency with a true verdict.
/// Frequencies are solved in parallel; each writes a disjoint slot, so the
/// result is identical for any schedule.
std::pair<WeightedSignal, SolveReport> solve(const MaterialLaw& law, const SpatialOperator& A,
                                             const WeightedSignal& f,
                                             const LawCertificate& cert);

/// Causality defect of the solution operator at the cut a_cut:
/// || 1_{<=a}( S f - S 1_{<=a} f ) ||_rho / ||f||_rho.
double check_causality(const MaterialLaw& law, const SpatialOperator& A,
                       const WeightedSignal& f, double a_cut, const LawCertificate& cert);

/// Autonomy defect || tau_h(S f) - S(tau_h f) ||_rho / ||tau_h f||_rho;
/// h must be a grid multiple and both f and its shift interior-supported.
double check_autonomy(const MaterialLaw& law, const SpatialOperator& A, const WeightedSignal& f,
                      double h, const LawCertificate& cert);

/// Solves in L_{2,rho1} and L_{2,rho2} (f reinterpreted; both lines must be
/// certified) and returns the worst pointwise discrepancy over the middle
/// half of the grid, measured in the e^{-rho_max (t - t_min)}-weighted
/// scale so late-time exponential unweighting noise cannot mask the
/// comparison; normalized by the weighted solution magnitude.
double check_rho_consistency(const MaterialLaw& law, const SpatialOperator& A,
                             const WeightedSignal& f, double rho2, const LawCertificate& cert1,
                             const LawCertificate& cert2);

}  // namespace evolab
