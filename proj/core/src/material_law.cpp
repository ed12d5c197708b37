#include "evolab/material_law.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>

namespace evolab {

namespace {

double diag_min_real(const Mat& m) {
  double v = m(0, 0).real();
  for (int i = 1; i < m.rows(); ++i) v = std::min(v, m(i, i).real());
  return v;
}

double diag_max_abs(const Mat& m) {
  double v = 0.0;
  for (int i = 0; i < m.rows(); ++i) v = std::max(v, std::abs(m(i, i)));
  return v;
}

// lambda_min of the Hermitian part, with a fast path for diagonal operators.
double herm_lambda_min(const SpatialOperator& op) {
  if (op.tags.diagonal) return diag_min_real(op.matrix);
  return lambda_min_hermitian(hermitian_part(op.matrix));
}

double op_norm(const SpatialOperator& op) {
  if (op.tags.diagonal) return diag_max_abs(op.matrix);
  return operator_norm(op.matrix);
}

}  // namespace

std::string law_kind_name(LawKind kind) {
  switch (kind) {
    case LawKind::Constant: return "constant";
    case LawKind::ReciprocalCoefficient: return "reciprocal_coefficient";
    case LawKind::ShiftedByAOverZ: return "shifted_by_a_over_z";
    case LawKind::NeumannLimit: return "neumann_limit";
    case LawKind::Custom: return "custom";
  }
  return "custom";
}

MaterialLaw::MaterialLaw(LawKind kind, std::string name, int dim, double nu, double alpha,
                         EvalFn eval)
    : kind_(kind), name_(std::move(name)), dim_(dim), nu_(nu), alpha_(alpha),
      eval_(std::move(eval)) {
  if (dim_ < 1) throw ContractViolation("MaterialLaw: dimension must be >= 1");
  if (alpha_ <= 0.0) throw ContractViolation("MaterialLaw: alpha must be > 0");
  if (!eval_) throw ContractViolation("MaterialLaw: eval function required");
}

SpatialOperator MaterialLaw::eval(Complex z) const {
  if (!(z.real() > nu_)) {
    std::ostringstream msg;
    msg << "MaterialLaw '" << name_ << "': eval at z = (" << z.real() << ", " << z.imag()
        << ") outside the half-plane Re z > " << nu_;
    throw ContractViolation(msg.str());
  }
  SpatialOperator op = eval_(z);
  if (op.dim != dim_)
    throw NumericalError("MaterialLaw '" + name_ + "': eval produced wrong dimension", 0.0);
  return op;
}

MaterialLaw constant_law(int dim, Complex c, double nu, double alpha) {
  return MaterialLaw(LawKind::Constant, "constant", dim, nu, alpha, [dim, c](Complex) {
    SpatialOperator op = SpatialOperator::identity(dim);
    op.matrix *= c;
    op.tags.identity = (c == Complex(1.0, 0.0));
    return op;
  });
}

MaterialLaw constant_diagonal_law(const RealVec& m, double nu, double alpha) {
  return MaterialLaw(LawKind::Constant, "constant_diagonal", static_cast<int>(m.size()), nu,
                     alpha, [m](Complex) { return multiplication_operator(m); });
}

MaterialLaw reciprocal_coefficient_law(const RealVec& a, double nu, double alpha) {
  if ((a.array() <= 0.0).any())
    throw ContractViolation("reciprocal_coefficient_law: coefficient must be > 0");
  if (nu <= 0.0) throw ContractViolation("reciprocal_coefficient_law: nu must be > 0");
  RealVec inv = a.cwiseInverse();
  return MaterialLaw(LawKind::ReciprocalCoefficient, "reciprocal_coefficient",
                     static_cast<int>(a.size()), nu, alpha,
                     [inv](Complex) { return multiplication_operator(inv); });
}

MaterialLaw shifted_coefficient_law(const RealVec& a) {
  const double nu = a.cwiseAbs().maxCoeff() + 1.0;
  const int d = static_cast<int>(a.size());
  return MaterialLaw(LawKind::ShiftedByAOverZ, "shifted_by_a_over_z", d, nu, 1.0,
                     [a, d](Complex z) {
                       Vec diag = Vec::Constant(d, Complex(1.0, 0.0));
                       diag += a.cast<Complex>() / z;
                       return multiplication_operator(diag);
                     });
}

MaterialLaw inverse_z_law(int dim, double nu) {
  if (nu <= 0.0) throw ContractViolation("inverse_z_law: nu must be > 0");
  return MaterialLaw(LawKind::Custom, "inverse_z", dim, nu, 1.0, [dim](Complex z) {
    Vec diag = Vec::Constant(dim, Complex(1.0, 0.0) / z);
    return multiplication_operator(diag);
  });
}

MaterialLaw custom_law(std::string name, int dim, double nu, double alpha,
                       MaterialLaw::EvalFn eval) {
  return MaterialLaw(LawKind::Custom, std::move(name), dim, nu, alpha, std::move(eval));
}

bool LawCertificate::covers(double rho, double xi) const {
  if (!wp_verdict) return false;
  for (double line : rho_lines)
    if (std::abs(line - rho) <= 1e-12 * std::max(1.0, std::abs(rho)) && xi <= xi_max * (1 + 1e-12))
      return true;
  return false;
}

std::vector<double> log_spaced_frequencies(double xi_max, int n_freq, double xi_min_ratio) {
  if (xi_max <= 0.0) throw ContractViolation("log_spaced_frequencies: xi_max must be > 0");
  if (n_freq < 3) throw ContractViolation("log_spaced_frequencies: n_freq must be >= 3");
  std::vector<double> xs;
  xs.push_back(0.0);
  const int half = (n_freq - 1) / 2;
  const double xi_min = xi_max * xi_min_ratio;
  for (int j = 0; j < half; ++j) {
    const double xi = half == 1 ? xi_max
                                : xi_min * std::pow(xi_max / xi_min,
                                                    static_cast<double>(j) / (half - 1));
    xs.push_back(xi);
    xs.push_back(-xi);
  }
  return xs;
}

LawCertificate certify_accretivity(const MaterialLaw& law, const std::vector<double>& rho_lines,
                                   int n_freq, double xi_max, double tol_factor) {
  if (rho_lines.empty()) throw ContractViolation("certify_accretivity: no rho lines");
  for (double rho : rho_lines)
    if (!(rho > law.nu()))
      throw ContractViolation("certify_accretivity: rho line at or below the abscissa nu");

  LawCertificate cert;
  cert.law_name = law.name();
  cert.kind = law.kind();
  cert.nu = law.nu();
  cert.alpha = law.alpha();
  cert.rho_lines = rho_lines;
  cert.xi_max = xi_max;
  cert.n_freq = n_freq;

  const std::vector<double> xis = log_spaced_frequencies(xi_max, n_freq);
  bool wp_ok = true;
  bool f_ok = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  double tol_worst = 0.0;
  for (double rho : rho_lines) {
    for (double xi : xis) {
      const Complex z(rho, xi);
      SpatialOperator m;
      try {
        m = law.eval(z);
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "certify_accretivity: eval failed at z = (" << rho << ", " << xi
            << "): " << e.what();
        throw NumericalError(msg.str(), 0.0);
      }
      SpatialOperator zm = operator_scale(z, m);
      CertSample s;
      s.rho = rho;
      s.xi = xi;
      s.lambda_min = herm_lambda_min(zm);
      s.z_norm = op_norm(zm);
      const double tol = tol_factor * s.z_norm;
      if (s.lambda_min < law.alpha() - tol) wp_ok = false;
      // beta(z) = |z|^2 ||M(z)||^2 = ||zM(z)||^2; check zM(z) in F(alpha, beta/alpha).
      // beta/alpha >= alpha always, with equality in degenerate cases (constant
      // unitary-multiple laws at xi = 0); nudge past the strict inequality.
      const double beta_over_alpha =
          std::max(s.z_norm * s.z_norm / law.alpha(), law.alpha() * (1.0 + 1e-12));
      const FMembership fm = check_F_membership(zm, law.alpha(), beta_over_alpha, tol);
      if (!fm.member) f_ok = false;
      if (s.lambda_min - law.alpha() < worst_margin) {
        worst_margin = s.lambda_min - law.alpha();
        cert.worst_sample = static_cast<int>(cert.samples.size());
        tol_worst = tol;
      }
      cert.samples.push_back(s);
    }
  }
  cert.tolerance = tol_worst;
  cert.wp_verdict = wp_ok;
  cert.f_class_verdict = f_ok;
  return cert;
}

FMembership check_F_membership(const SpatialOperator& C, double alpha, double beta, double tol) {
  if (!(0.0 < alpha && alpha < beta))
    throw ContractViolation("check_F_membership: need 0 < alpha < beta");
  FMembership out;
  if (C.tags.diagonal) {
    // Per diagonal entry c: Herm contributes Re c, the quadratic form |c|^2.
    int acc_idx = 0, quad_idx = 0;
    out.accretive_margin = std::numeric_limits<double>::infinity();
    out.quadratic_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < C.dim; ++i) {
      const Complex c = C.matrix(i, i);
      const double acc = c.real() - alpha;
      const double quad = c.real() - std::norm(c) / beta;
      if (acc < out.accretive_margin) { out.accretive_margin = acc; acc_idx = i; }
      if (quad < out.quadratic_margin) { out.quadratic_margin = quad; quad_idx = i; }
    }
    out.member = out.accretive_margin >= -tol && out.quadratic_margin >= -tol;
    if (!out.member) {
      out.witness = Vec::Zero(C.dim);
      out.witness(out.accretive_margin <= out.quadratic_margin ? acc_idx : quad_idx) = 1.0;
    }
    return out;
  }
  const Mat herm = hermitian_part(C.matrix);
  const int d = C.dim;
  const Mat acc = herm - alpha * Mat::Identity(d, d);
  const Mat quad = herm - (1.0 / beta) * (C.matrix.adjoint() * C.matrix);

  Eigen::SelfAdjointEigenSolver<Mat> es_acc(acc);
  Eigen::SelfAdjointEigenSolver<Mat> es_quad(quad);
  if (es_acc.info() != Eigen::Success || es_quad.info() != Eigen::Success)
    throw NumericalError("check_F_membership: eigensolver failed", 0.0);
  out.accretive_margin = es_acc.eigenvalues().minCoeff();
  out.quadratic_margin = es_quad.eigenvalues().minCoeff();
  out.member = out.accretive_margin >= -tol && out.quadratic_margin >= -tol;
  if (!out.member) {
    if (out.accretive_margin <= out.quadratic_margin) {
      int idx = 0;
      es_acc.eigenvalues().minCoeff(&idx);
      out.witness = es_acc.eigenvectors().col(idx);
    } else {
      int idx = 0;
      es_quad.eigenvalues().minCoeff(&idx);
      out.witness = es_quad.eigenvectors().col(idx);
    }
  }
  return out;
}

GrowthClassResult check_growth_class(const MaterialLaw& law, double nu, double alpha,
                                     double beta, const std::vector<Complex>& z_samples,
                                     double tol) {
  if (!(beta * nu >= alpha))
    throw ContractViolation("check_growth_class: incompatible constants, need beta*nu >= alpha");
  GrowthClassResult out;
  out.z_samples = z_samples;
  out.verdict = true;
  for (Complex z : z_samples) {
    const SpatialOperator zm = operator_scale(z, law.eval(z));
    const double b = beta * std::abs(z);
    bool ok = b > alpha;
    if (ok) ok = check_F_membership(zm, alpha, b, tol).member;
    out.per_sample.push_back(ok);
    out.verdict = out.verdict && ok;
  }
  return out;
}

WeightedSignal apply_material_law(const MaterialLaw& law, const WeightedSignal& f) {
  if (!(f.rho > law.nu()))
    throw ContractViolation("apply_material_law: f.rho must exceed the abscissa nu");
  if (f.dim() != law.dim())
    throw ContractViolation("apply_material_law: dimension mismatch");
  Spectrum F = fourier_laplace(f);
  for (int k = 0; k < F.grid.n_samples(); ++k) {
    SpatialOperator m;
    try {
      m = law.eval(F.z(k));
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "apply_material_law: eval failed at frequency index " << k << " (xi = "
          << F.grid.xi(k) << "): " << e.what();
      throw NumericalError(msg.str(), 0.0);
    }
    F.coeffs.col(k) = m.matrix * F.coeffs.col(k);
  }
  return inverse_fourier_laplace(F);
}

LinearGrowthResult linear_growth_bound_check(const MaterialLaw& law, double sup_bound,
                                             double alpha, const std::vector<Complex>& z_samples,
                                             double tol) {
  LinearGrowthResult out;
  out.z_samples = z_samples;
  out.verdict = true;
  out.worst_excess = -std::numeric_limits<double>::infinity();
  for (Complex z : z_samples) {
    const double norm = op_norm(law.eval(z));
    out.norms.push_back(norm);
    const double bound = (sup_bound * sup_bound / alpha) * std::abs(z);
    out.worst_excess = std::max(out.worst_excess, norm - bound);
    if (norm > bound + tol) out.verdict = false;
  }
  return out;
}

double holomorphy_defect(const MaterialLaw& law, Complex z, double h) {
  const Mat real_step = (law.eval(z + h).matrix - law.eval(z - h).matrix) / (2.0 * h);
  const Complex ih(0.0, h);
  const Mat imag_step = (law.eval(z + ih).matrix - law.eval(z - ih).matrix) / (2.0 * ih);
  return operator_norm(real_step - imag_step);
}

}  // namespace evolab
