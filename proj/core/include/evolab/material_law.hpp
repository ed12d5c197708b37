#pragma once

#include "evolab/common.hpp"
#include "evolab/space_ops.hpp"
#include "evolab/time_axis.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace evolab {

enum class LawKind {
  Constant,
  ReciprocalCoefficient,
  ShiftedByAOverZ,
  NeumannLimit,
  Custom,
};

std::string law_kind_name(LawKind kind);

/// Evaluable map z -> M(z) on the half-plane Re z > nu, together with the
/// declared abscissa nu and accretivity constant alpha of the solvability
/// condition Re<phi, z M(z) phi> >= alpha ||phi||^2.
class MaterialLaw {
 public:
  using EvalFn = std::function<SpatialOperator(Complex)>;

  MaterialLaw(LawKind kind, std::string name, int dim, double nu, double alpha, EvalFn eval);

  SpatialOperator eval(Complex z) const;

  LawKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double nu() const { return nu_; }
  double alpha() const { return alpha_; }

  /// Geometric truncation-tail estimate attached by neumann_limit_law.
  std::optional<double> truncation_tail() const { return truncation_tail_; }
  void set_truncation_tail(double tail) { truncation_tail_ = tail; }

 private:
  LawKind kind_;
  std::string name_;
  int dim_;
  double nu_;
  double alpha_;
  EvalFn eval_;
  std::optional<double> truncation_tail_;
};

/// M(z) = c * I.
MaterialLaw constant_law(int dim, Complex c, double nu, double alpha);
/// M(z) = diag(m).
MaterialLaw constant_diagonal_law(const RealVec& m, double nu, double alpha);
/// M(z) = diag(1/a). alpha is the accretivity constant the caller claims
/// for the lines it intends to certify (rho * min(1/a) on the line Re z = rho).
MaterialLaw reciprocal_coefficient_law(const RealVec& a, double nu, double alpha);
/// M(z) = I + diag(a)/z; declared nu = ||a||_inf + 1, alpha = 1.
MaterialLaw shifted_coefficient_law(const RealVec& a);
/// M(z) = (1/z) * I; z M(z) = I.
MaterialLaw inverse_z_law(int dim, double nu);
MaterialLaw custom_law(std::string name, int dim, double nu, double alpha,
                       MaterialLaw::EvalFn eval);

struct CertSample {
  double rho;
  double xi;
  double lambda_min;  // lambda_min of Herm(z M(z))
  double z_norm;      // ||z M(z)||
};

/// Record of a numerical membership check of the accretivity condition and
/// the derived operator-class inequalities on a sampled set of z values.
/// A true verdict means every sampled minimum cleared its threshold minus
/// the recorded tolerance; the sample set itself is part of the record.
struct LawCertificate {
  std::string law_name;
  LawKind kind = LawKind::Custom;
  double nu = 0.0;
  double alpha = 0.0;
  std::vector<double> rho_lines;
  double xi_max = 0.0;
  int n_freq = 0;
  double tolerance = 0.0;
  std::vector<CertSample> samples;
  bool wp_verdict = false;          // Re<phi, zM(z)phi> >= alpha ||phi||^2
  bool f_class_verdict = false;     // zM(z) in F(alpha, beta(z)/alpha), beta(z) = |z|^2 ||M(z)||^2
  std::optional<double> growth_beta;          // beta of the |z|-scaled class, if checked
  std::optional<bool> growth_class_verdict;   // zM(z) in F(alpha, beta |z|)
  int worst_sample = -1;

  /// True if the certificate sampled the line Re z = rho up to |xi| >= xi.
  bool covers(double rho, double xi) const;
};

/// Samples each line Re z = rho (xi log-spaced symmetric plus xi = 0, up
/// to xi_max), computes lambda_min(Herm(z M(z))) per sample and issues the
/// verdicts. Tolerance per sample is tol_factor * ||z M(z)||.
LawCertificate certify_accretivity(const MaterialLaw& law, const std::vector<double>& rho_lines,
                                   int n_freq, double xi_max, double tol_factor = 1e-9);

struct FMembership {
  bool member = false;
  double accretive_margin = 0.0;  // lambda_min(Herm(C) - alpha I)
  double quadratic_margin = 0.0;  // lambda_min(Herm(C) - (1/beta) C* C)
  Vec witness;                    // violating eigenvector when member == false
};

/// Membership of C in F(alpha, beta, H): Herm(C) >= alpha I and
/// ||C phi||^2 <= beta Re<phi, C phi>.
FMembership check_F_membership(const SpatialOperator& C, double alpha, double beta,
                               double tol = 1e-9);

struct GrowthClassResult {
  bool verdict = false;
  std::vector<Complex> z_samples;
  std::vector<bool> per_sample;
};

/// Membership in the |z|-scaled class: z M(z) in F(alpha, beta |z|) at each
/// sampled z. Requires the compatibility beta * nu >= alpha.
GrowthClassResult check_growth_class(const MaterialLaw& law, double nu, double alpha,
                                     double beta, const std::vector<Complex>& z_samples,
                                     double tol = 1e-9);

/// M(partial_t) f: multiply the Fourier-Laplace coefficients by
/// M(i xi_k + rho) and transform back. Requires f.rho > law.nu.
WeightedSignal apply_material_law(const MaterialLaw& law, const WeightedSignal& f);

struct LinearGrowthResult {
  bool verdict = false;
  double worst_excess = 0.0;  // max over samples of ||M(z)|| - bound(z)
  std::vector<Complex> z_samples;
  std::vector<double> norms;
};

/// ||M(z)|| <= (sup_bound^2 / alpha) |z| + tol at every sample.
LinearGrowthResult linear_growth_bound_check(const MaterialLaw& law, double sup_bound,
                                             double alpha, const std::vector<Complex>& z_samples,
                                             double tol = 1e-9);

/// Direction dependence of the centered difference quotient at z: the gap
/// between the derivative sampled with real step h and with imaginary step
/// ih. O(h^2) for a holomorphic law; a testable Cauchy-Riemann surrogate.
double holomorphy_defect(const MaterialLaw& law, Complex z, double h);

/// 0, then +/- xi_max * r^{-j} down to xi_min (log-spaced symmetric).
std::vector<double> log_spaced_frequencies(double xi_max, int n_freq, double xi_min_ratio = 1e-3);

}  // namespace evolab
