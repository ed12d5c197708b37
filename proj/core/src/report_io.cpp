#include "evolab/report_io.hpp"

#include <ostream>

namespace evolab {

using nlohmann::json;

namespace {

json complex_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

json to_json(const LawCertificate& cert) {
  json samples = json::array();
  for (const CertSample& s : cert.samples)
    samples.push_back(json{{"rho", s.rho},
                           {"xi", s.xi},
                           {"lambda_min", s.lambda_min},
                           {"z_norm", s.z_norm}});
  json j{{"law", cert.law_name},
         {"kind", law_kind_name(cert.kind)},
         {"nu", cert.nu},
         {"alpha", cert.alpha},
         {"rho_lines", cert.rho_lines},
         {"xi_max", cert.xi_max},
         {"n_freq", cert.n_freq},
         {"tolerance", cert.tolerance},
         {"samples", samples},
         {"wp_verdict", cert.wp_verdict},
         {"f_class_verdict", cert.f_class_verdict},
         {"worst_sample", cert.worst_sample}};
  if (cert.growth_beta) j["growth_beta"] = *cert.growth_beta;
  if (cert.growth_class_verdict) j["growth_class_verdict"] = *cert.growth_class_verdict;
  return j;
}

json to_json(const SolveReport& report) {
  json j{{"residual", report.residual},
         {"norm_ratio", report.norm_ratio},
         {"alpha_used", report.alpha_used},
         {"boundary_leakage", report.boundary_leakage}};
  if (report.causality_defect) j["causality_defect"] = *report.causality_defect;
  return j;
}

json to_json(const FMembership& check) {
  return json{{"member", check.member},
              {"accretive_margin", check.accretive_margin},
              {"quadratic_margin", check.quadratic_margin}};
}

json to_json(const LinearGrowthResult& check) {
  json samples = json::array();
  for (std::size_t i = 0; i < check.z_samples.size(); ++i) {
    json s{{"z", complex_json(check.z_samples[i])}};
    if (i < check.norms.size()) s["norm"] = check.norms[i];
    samples.push_back(s);
  }
  return json{{"verdict", check.verdict},
              {"worst_excess", check.worst_excess},
              {"samples", samples}};
}

json to_json(const MomentTable& table) {
  return json{{"k_max", table.k_max}, {"b", table.b}, {"b_inv", table.b_inv},
              {"kappa", table.kappa}};
}

json to_json(const GConvergenceReport& report) {
  json pairings = json::array();
  for (long i = 0; i < report.pairings.rows(); ++i) {
    json row = json::array();
    for (long j = 0; j < report.pairings.cols(); ++j)
      row.push_back(complex_json(report.pairings(i, j)));
    pairings.push_back(row);
  }
  json limits = json::array();
  for (long j = 0; j < report.limit_pairings.size(); ++j)
    limits.push_back(complex_json(report.limit_pairings(j)));
  return json{{"n_list", report.n_list},
              {"test_ids", report.test_ids},
              {"pairings", pairings},
              {"limit_pairings", limits},
              {"defects", report.defects},
              {"cauchy", report.cauchy},
              {"verdict", report.verdict},
              {"fitted_rate", report.fitted_rate},
              {"tolerance", report.tolerance}};
}

json to_json(const LongitudinalResult& result) {
  json reports = json::array();
  for (const SolveReport& r : result.dynamic_reports) reports.push_back(to_json(r));
  return json{{"moments", to_json(result.moments)},
              {"static", to_json(result.static_report)},
              {"dynamic", to_json(result.dynamic_report)},
              {"exact_oracle_defect", result.exact_oracle_defect},
              {"exact_oracle_index", result.exact_oracle_index},
              {"wrap_bound", result.wrap_bound},
              {"limit_f_check", to_json(result.limit_f_check)},
              {"prelimit_alpha", result.prelimit_alpha},
              {"prelimit_beta", result.prelimit_beta},
              {"growth", to_json(result.growth)},
              {"limit_norm_sup", result.limit_norm_sup},
              {"solve_reports", reports},
              {"verdict", result.verdict}};
}

json to_json(const OrthogonalResult& result) {
  json reports = json::array();
  for (const SolveReport& r : result.dynamic_reports) reports.push_back(to_json(r));
  return json{{"moments", to_json(result.moments)},
              {"dynamic", to_json(result.dynamic_report)},
              {"static", to_json(result.static_report)},
              {"max_partial_sum_norm", result.max_partial_sum_norm},
              {"tail_bound_ok", result.tail_bound_ok},
              {"k_sensitivity", result.k_sensitivity},
              {"k_sensitivity_bound", result.k_sensitivity_bound},
              {"growth", to_json(result.growth)},
              {"limit_f_check", to_json(result.limit_f_check)},
              {"prelimit_alpha", result.prelimit_alpha},
              {"prelimit_beta", result.prelimit_beta},
              {"solve_reports", reports},
              {"verdict", result.verdict}};
}

json to_json(const ConstantProfileCheck& check) {
  return json{{"solve_discrepancy", check.solve_discrepancy},
              {"law_discrepancy", check.law_discrepancy},
              {"tail", check.tail},
              {"ok", check.ok}};
}

void write_pairing_csv(std::ostream& os, const GConvergenceReport& report) {
  os << "n,test_id,re,im,defect\n";
  os.precision(17);
  const bool has_limit = report.limit_pairings.size() == report.pairings.cols();
  for (long i = 0; i < report.pairings.rows(); ++i) {
    for (long j = 0; j < report.pairings.cols(); ++j) {
      const Complex p = report.pairings(i, j);
      const double defect = has_limit ? std::abs(p - report.limit_pairings(j)) : 0.0;
      os << report.n_list[static_cast<std::size_t>(i)] << ","
         << report.test_ids[static_cast<std::size_t>(j)] << "," << p.real() << "," << p.imag()
         << "," << defect << "\n";
    }
  }
}

}  // namespace evolab
