#include "evolab/evo_solver.hpp"
#include "evolab/homogenize.hpp"
#include "evolab/material_law.hpp"
#include "evolab/report_io.hpp"
#include "evolab/space_ops.hpp"
#include "evolab/time_axis.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace evolab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitVerdictFailed = 2;

// Merges the user config over the defaults; unknown keys are an error so a
// typo cannot silently fall back to a default.
json merge_config(const json& defaults, const json& user) {
  json out = defaults;
  for (auto it = user.begin(); it != user.end(); ++it) {
    if (!defaults.contains(it.key()))
      throw ContractViolation("config: unknown field '" + it.key() + "'");
    out[it.key()] = it.value();
  }
  return out;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ContractViolation("config: cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ContractViolation("config: parse error in '" + path + "': " + e.what());
  }
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_report(const fs::path& out_dir, const json& report) {
  fs::create_directories(out_dir);
  std::ofstream os(out_dir / "report.json");
  os << report.dump(2) << "\n";
}

void write_csv(const fs::path& out_dir, const std::string& name,
               const GConvergenceReport& rep) {
  std::ofstream os(out_dir / name);
  write_pairing_csv(os, rep);
}

CoefficientFamily family_from_config(const json& cfg) {
  const std::string name = cfg.at("profile").get<std::string>();
  if (name == "constant") return constant_family(cfg.at("profile_c").get<double>());
  if (name == "two_plus_sine") return two_plus_sine_family();
  if (name == "custom_samples") {
    const auto samples = cfg.at("profile_samples").get<std::vector<double>>();
    return custom_samples_family(samples);
  }
  throw ContractViolation("config: unknown profile '" + name + "'");
}

TimeGrid time_grid_from_config(const json& cfg) {
  return TimeGrid(cfg.at("t_min").get<double>(), cfg.at("t_max").get<double>(),
                  cfg.at("n_samples").get<int>());
}

// ---------------------------------------------------------------- selftest

int run_selftest(const json& user, const fs::path& out_dir) {
  const json defaults{{"t_min", 0.0},    {"t_max", 16.0},  {"n_samples", 16384},
                      {"length_x", 1.0}, {"n_x", 128},     {"rho", 2.0},
                      {"seed", 1},       {"unitarity_tol", 1e-8},
                      {"inverse_pair_tol", 1e-6}};
  const json cfg = merge_config(defaults, user);
  const TimeGrid tg = time_grid_from_config(cfg);
  const double rho = cfg.at("rho").get<double>();
  Rng rng(cfg.at("seed").get<std::uint64_t>());

  Mat values = Mat::Zero(1, tg.n_samples());
  for (int b = 0; b < 5; ++b) {
    const double c = tg.t_min() + tg.duration() * rng.uniform(0.35, 0.65);
    const double w = tg.duration() * rng.uniform(0.03, 0.07);
    const Complex amp(rng.normal(), rng.normal());
    for (int s = 0; s < tg.n_samples(); ++s)
      values(0, s) += amp * std::exp(-std::pow((tg.time(s) - c) / w, 2));
  }
  const WeightedSignal f(tg, values, rho);

  const double unitarity =
      std::abs(spectrum_norm(fourier_laplace(f)) / weighted_norm(f) - 1.0);
  WeightedSignal rt(tg, inverse_fourier_laplace(fourier_laplace(f)).values - f.values, rho);
  const double roundtrip = weighted_norm(rt) / weighted_norm(f);
  WeightedSignal ip(tg, time_derivative(antiderivative(f)).values - f.values, rho);
  const double inverse_pair = weighted_norm(ip) / weighted_norm(f);
  WeightedSignal ip2(tg, antiderivative(time_derivative(f)).values - f.values, rho);
  const double inverse_pair2 = weighted_norm(ip2) / weighted_norm(f);

  const SpaceGrid grid(cfg.at("length_x").get<double>(), cfg.at("n_x").get<int>());
  const SpatialOperator d = periodic_derivative(grid);
  const double skew_defect = (d.matrix + d.matrix.transpose()).cwiseAbs().maxCoeff();

  const bool ok = unitarity <= cfg.at("unitarity_tol").get<double>() &&
                  roundtrip <= 1e-10 &&
                  inverse_pair <= cfg.at("inverse_pair_tol").get<double>() &&
                  inverse_pair2 <= cfg.at("inverse_pair_tol").get<double>() &&
                  skew_defect == 0.0;

  json report{{"experiment", "selftest"},
              {"config", cfg},
              {"results",
               {{"unitarity_defect", unitarity},
                {"roundtrip_defect", roundtrip},
                {"inverse_pair_defect", inverse_pair},
                {"inverse_pair_defect_reversed", inverse_pair2},
                {"skew_defect", skew_defect}}},
              {"verdict", ok},
              {"timestamp", timestamp_utc()}};
  write_report(out_dir, report);
  return ok ? kExitOk : kExitVerdictFailed;
}

// ---------------------------------------------------------------- certify

MaterialLaw law_from_config(const json& cfg, const SpaceGrid& grid, double rho) {
  const std::string kind = cfg.at("law").get<std::string>();
  const int nx = grid.n_x();
  if (kind == "constant") {
    const double c = cfg.at("law_c").get<double>();
    return constant_law(nx, Complex(c, 0.0), 0.5 * rho, rho * c);
  }
  if (kind == "reciprocal_coefficient") {
    const CoefficientFamily fam = family_from_config(cfg);
    const RealVec a = fam.sample(cfg.at("oscillation_index").get<int>(), grid, Axis::X);
    return reciprocal_coefficient_law(a, 0.5 * rho, rho * a.cwiseInverse().minCoeff());
  }
  if (kind == "shifted_by_a_over_z") {
    const CoefficientFamily fam = family_from_config(cfg);
    const RealVec a = fam.sample(cfg.at("oscillation_index").get<int>(), grid, Axis::X);
    return shifted_coefficient_law(a);
  }
  if (kind == "neumann_limit") {
    const CoefficientFamily fam = family_from_config(cfg);
    const MomentTable moments = periodic_moments(fam, cfg.at("K").get<int>());
    const SpatialOperator a_op = periodic_derivative(grid);
    return neumann_limit_law(moments, a_op, rho, cfg.at("K").get<int>(),
                             cfg.at("L").get<int>());
  }
  throw ContractViolation("config: unknown law '" + kind + "'");
}

int run_certify(const json& user, const fs::path& out_dir) {
  const json defaults{{"t_min", 0.0},      {"t_max", 16.0},
                      {"n_samples", 1024}, {"length_x", 1.0},
                      {"n_x", 128},        {"rho_lines", json::array({2.0})},
                      {"n_freq", 21},      {"law", "reciprocal_coefficient"},
                      {"law_c", 1.0},      {"profile", "two_plus_sine"},
                      {"profile_c", 2.0},  {"profile_samples", json::array()},
                      {"oscillation_index", 4},
                      {"K", 12},           {"L", 12},
                      {"seed", 1},         {"tol_factor", 1e-9}};
  const json cfg = merge_config(defaults, user);
  const TimeGrid tg = time_grid_from_config(cfg);
  const SpaceGrid grid(cfg.at("length_x").get<double>(), cfg.at("n_x").get<int>());
  const auto rho_lines = cfg.at("rho_lines").get<std::vector<double>>();
  if (rho_lines.empty()) throw ContractViolation("config: rho_lines must be nonempty");
  MaterialLaw law = law_from_config(cfg, grid, rho_lines.front());
  const LawCertificate cert = certify_accretivity(law, rho_lines, cfg.at("n_freq").get<int>(),
                                                  tg.nyquist(),
                                                  cfg.at("tol_factor").get<double>());
  json report{{"experiment", "certify"},
              {"config", cfg},
              {"results", {{"certificate", to_json(cert)}}},
              {"verdict", cert.wp_verdict},
              {"timestamp", timestamp_utc()}};
  write_report(out_dir, report);
  return cert.wp_verdict ? kExitOk : kExitVerdictFailed;
}

// ---------------------------------------------------------------- solve

int run_solve(const json& user, const fs::path& out_dir) {
  const json defaults{{"t_min", 0.0},      {"t_max", 16.0},
                      {"n_samples", 1024}, {"length_x", 1.0},
                      {"n_x", 128},        {"rho", 2.0},
                      {"law", "reciprocal_coefficient"},
                      {"law_c", 1.0},      {"profile", "two_plus_sine"},
                      {"profile_c", 2.0},  {"profile_samples", json::array()},
                      {"oscillation_index", 4},
                      {"K", 12},           {"L", 12},
                      {"f_time_center", 6.0}, {"f_time_width", 1.0},
                      {"f_x_center", 0.5},    {"f_x_width", 0.1},
                      {"n_freq", 21},      {"seed", 1},
                      {"causality_cut", 0.0}};
  const json cfg = merge_config(defaults, user);
  const TimeGrid tg = time_grid_from_config(cfg);
  const SpaceGrid grid(cfg.at("length_x").get<double>(), cfg.at("n_x").get<int>());
  const double rho = cfg.at("rho").get<double>();
  MaterialLaw law = law_from_config(cfg, grid, rho);
  const SpatialOperator A = periodic_derivative(grid);
  const LawCertificate cert =
      certify_accretivity(law, {rho}, cfg.at("n_freq").get<int>(), tg.nyquist());

  Mat values(grid.n_x(), tg.n_samples());
  const double tc = cfg.at("f_time_center").get<double>();
  const double tw = cfg.at("f_time_width").get<double>();
  const double xc = cfg.at("f_x_center").get<double>();
  const double xw = cfg.at("f_x_width").get<double>();
  for (int s = 0; s < tg.n_samples(); ++s) {
    const double ft = std::exp(-std::pow((tg.time(s) - tc) / tw, 2));
    for (int j = 0; j < grid.n_x(); ++j)
      values(j, s) = ft * std::exp(-std::pow((grid.x(j) - xc) / xw, 2));
  }
  const WeightedSignal f(tg, values, rho);
  auto [u, rep] = solve(law, A, f, cert);
  const double cut = cfg.at("causality_cut").get<double>();
  SolveReport report_struct = rep;
  if (cut > tg.t_min() && cut < tg.t_max())
    report_struct.causality_defect = check_causality(law, A, f, cut, cert);

  fs::create_directories(out_dir);
  {
    std::ofstream os(out_dir / "u.csv");
    write_signal_csv(os, u);
  }
  const bool ok = rep.residual <= 1e-10 &&
                  rep.norm_ratio <= 1.0 / cert.alpha * (1.0 + 1e-6);
  json report{{"experiment", "solve"},
              {"config", cfg},
              {"results",
               {{"solve_report", to_json(report_struct)}, {"certificate", to_json(cert)}}},
              {"verdict", ok},
              {"timestamp", timestamp_utc()}};
  write_report(out_dir, report);
  return ok ? kExitOk : kExitVerdictFailed;
}

// ---------------------------------------------------------------- gconv-static

int run_gconv_static(const json& user, const fs::path& out_dir) {
  const json defaults{{"t_min", 0.0},     {"t_max", 16.0},     {"n_samples", 1024},
                      {"length_x", 1.0},  {"n_x", 768},        {"rho", 2.0},
                      {"profile", "two_plus_sine"}, {"profile_c", 2.0},
                      {"profile_samples", json::array()},
                      {"n_list", json::array({4, 8, 16, 32, 64})},
                      {"psi_center", 0.5}, {"psi_width", 0.08},
                      {"n_freq", 15},     {"seed", 1},
                      {"tolerance", 2e-3}};
  const json cfg = merge_config(defaults, user);
  const SpaceGrid grid(cfg.at("length_x").get<double>(), cfg.at("n_x").get<int>());
  const double rho = cfg.at("rho").get<double>();
  const CoefficientFamily fam = family_from_config(cfg);
  const MomentTable moments = periodic_moments(fam, 2);
  const SpatialOperator A = periodic_derivative(grid);
  const TimeGrid tg = time_grid_from_config(cfg);

  const TestSet tests =
      make_test_set(grid.n_x(), grid.length_x(), cfg.at("seed").get<std::uint64_t>());
  Vec psi(grid.n_x());
  const double pc = cfg.at("psi_center").get<double>();
  const double pw = cfg.at("psi_width").get<double>();
  for (int j = 0; j < grid.n_x(); ++j)
    psi(j) = std::exp(-std::pow((grid.x(j) - pc) / pw, 2));
  psi /= std::sqrt(psi.squaredNorm() * grid.h_x());

  std::vector<SequenceEntry> entries;
  for (int n : cfg.at("n_list").get<std::vector<int>>()) {
    const RealVec a = fam.sample(n, grid, Axis::X);
    MaterialLaw law =
        reciprocal_coefficient_law(a, 0.5 * rho, rho * a.cwiseInverse().minCoeff());
    LawCertificate cert =
        certify_accretivity(law, {rho}, cfg.at("n_freq").get<int>(), tg.nyquist());
    entries.push_back(SequenceEntry{n, std::move(law), std::move(cert)});
  }
  MaterialLaw limit =
      constant_law(grid.n_x(), Complex(moments.b_inv, 0.0), 0.5 * rho, rho * moments.b_inv);
  LawCertificate limit_cert =
      certify_accretivity(limit, {rho}, cfg.at("n_freq").get<int>(), tg.nyquist());
  const GConvergenceReport rep =
      static_criterion(entries, A, rho, psi, tests, grid.h_x(), &limit, &limit_cert,
                       cfg.at("tolerance").get<double>());
  write_csv(out_dir, "pairings.csv", rep);
  json report{{"experiment", "gconv-static"},
              {"config", cfg},
              {"results", {{"report", to_json(rep)}, {"moments", to_json(moments)}}},
              {"verdict", rep.verdict},
              {"timestamp", timestamp_utc()}};
  write_report(out_dir, report);
  return rep.verdict ? kExitOk : kExitVerdictFailed;
}

// ---------------------------------------------------------------- examples

LongitudinalConfig longitudinal_config_from_json(const json& cfg) {
  LongitudinalConfig c;
  c.grid = SpaceGrid(cfg.at("length_x").get<double>(), cfg.at("n_x").get<int>());
  c.time_grid = time_grid_from_config(cfg);
  c.rho = cfg.at("rho").get<double>();
  c.n_list = cfg.at("n_list").get<std::vector<int>>();
  c.psi_center = cfg.at("psi_center").get<double>();
  c.psi_width = cfg.at("psi_width").get<double>();
  c.f_time_center = cfg.at("f_time_center").get<double>();
  c.f_time_width = cfg.at("f_time_width").get<double>();
  c.seed = cfg.at("seed").get<std::uint64_t>();
  c.cert_n_freq = cfg.at("n_freq").get<int>();
  c.static_tolerance = cfg.at("static_tolerance").get<double>();
  c.dynamic_tolerance = cfg.at("dynamic_tolerance").get<double>();
  c.exact_oracle_index = cfg.at("exact_oracle_index").get<int>();
  c.exact_oracle_rho = cfg.at("exact_oracle_rho").get<double>();
  c.exact_oracle_tolerance = cfg.at("exact_oracle_tolerance").get<double>();
  return c;
}

int run_example_longitudinal(const json& user, const fs::path& out_dir) {
  const json defaults{{"t_min", 0.0},      {"t_max", 16.0},   {"n_samples", 256},
                      {"length_x", 1.0},   {"n_x", 768},      {"rho", 2.0},
                      {"profile", "two_plus_sine"}, {"profile_c", 2.0},
                      {"profile_samples", json::array()},
                      {"n_list", json::array({4, 8, 16, 32, 64})},
                      {"psi_center", 0.5}, {"psi_width", 0.08},
                      {"f_time_center", 6.0}, {"f_time_width", 1.2},
                      {"n_freq", 15},      {"seed", 1},
                      {"static_tolerance", 2e-3}, {"dynamic_tolerance", 2e-3},
                      {"exact_oracle_index", 256}, {"exact_oracle_rho", 24.0},
                      {"exact_oracle_tolerance", 2e-3}};
  const json cfg = merge_config(defaults, user);
  const CoefficientFamily fam = family_from_config(cfg);
  const LongitudinalResult result =
      longitudinal_experiment(fam, longitudinal_config_from_json(cfg));
  write_csv(out_dir, "static_pairings.csv", result.static_report);
  write_csv(out_dir, "dynamic_pairings.csv", result.dynamic_report);
  json report{{"experiment", "example-longitudinal"},
              {"config", cfg},
              {"results", to_json(result)},
              {"verdict", result.verdict},
              {"timestamp", timestamp_utc()}};
  write_report(out_dir, report);
  return result.verdict ? kExitOk : kExitVerdictFailed;
}

OrthogonalConfig orthogonal_config_from_json(const json& cfg) {
  OrthogonalConfig c;
  c.grid = SpaceGrid(cfg.at("length_x").get<double>(), cfg.at("n_x").get<int>(),
                     cfg.at("length_y").get<double>(), cfg.at("n_y").get<int>());
  c.time_grid = time_grid_from_config(cfg);
  c.rho = cfg.at("rho").get<double>();
  c.n_list = cfg.at("n_list").get<std::vector<int>>();
  c.K = cfg.at("K").get<int>();
  c.L = cfg.at("L").get<int>();
  c.fx_center = cfg.at("f_x_center").get<double>();
  c.fx_width = cfg.at("f_x_width").get<double>();
  c.fy_center = cfg.at("f_y_center").get<double>();
  c.fy_width = cfg.at("f_y_width").get<double>();
  c.f_time_center = cfg.at("f_time_center").get<double>();
  c.f_time_width = cfg.at("f_time_width").get<double>();
  c.seed = cfg.at("seed").get<std::uint64_t>();
  c.cert_n_freq = cfg.at("n_freq").get<int>();
  c.dynamic_tolerance = cfg.at("dynamic_tolerance").get<double>();
  c.static_tolerance = cfg.at("static_tolerance").get<double>();
  return c;
}

int run_example_orthogonal(const json& user, const fs::path& out_dir) {
  const json defaults{{"t_min", 0.0},    {"t_max", 8.0},    {"n_samples", 128},
                      {"length_x", 8.0}, {"n_x", 48},
                      {"length_y", 1.0}, {"n_y", 512},      {"rho", 16.5},
                      {"profile", "two_plus_sine"}, {"profile_c", 2.0},
                      {"profile_samples", json::array()},
                      {"n_list", json::array({4, 8, 16, 32, 64})},
                      {"K", 12},         {"L", 12},
                      {"f_x_center", 3.0}, {"f_x_width", 0.7},
                      {"f_y_center", 0.5}, {"f_y_width", 0.15},
                      {"f_time_center", 2.5}, {"f_time_width", 0.5},
                      {"n_freq", 15},    {"seed", 2},
                      {"dynamic_tolerance", 2e-3}, {"static_tolerance", 2e-3}};
  const json cfg = merge_config(defaults, user);
  const CoefficientFamily fam = family_from_config(cfg);
  const OrthogonalResult result = orthogonal_experiment(fam, orthogonal_config_from_json(cfg));
  write_csv(out_dir, "dynamic_pairings.csv", result.dynamic_report);
  write_csv(out_dir, "static_pairings.csv", result.static_report);
  json report{{"experiment", "example-orthogonal"},
              {"config", cfg},
              {"results", to_json(result)},
              {"verdict", result.verdict},
              {"timestamp", timestamp_utc()}};
  write_report(out_dir, report);
  return result.verdict ? kExitOk : kExitVerdictFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evolab: a numerical laboratory for evolutionary equations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "evolab_out";
  app.add_option("--config", config_path, "JSON experiment configuration")
      ->envname("EVOLAB_CONFIG");
  app.add_option("--out", out_dir, "output directory for report.json and CSV artifacts");

  auto add = [&](const std::string& name, const std::string& desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->fallthrough();
    return sub;
  };
  CLI::App* selftest = add("selftest", "transform and operator identity suite");
  CLI::App* solve_cmd = add("solve", "single space-time solve with certificates");
  CLI::App* certify = add("certify", "accretivity certification of a material law");
  CLI::App* gconv = add("gconv-static", "static resolvent G-convergence criterion");
  CLI::App* ex_long = add("example-longitudinal", "transport with longitudinal oscillations");
  CLI::App* ex_orth = add("example-orthogonal", "transport with orthogonal oscillations");

  CLI11_PARSE(app, argc, argv);

  try {
    const json user = load_config(config_path);
    const fs::path out(out_dir);
    if (selftest->parsed()) return run_selftest(user, out);
    if (solve_cmd->parsed()) return run_solve(user, out);
    if (certify->parsed()) return run_certify(user, out);
    if (gconv->parsed()) return run_gconv_static(user, out);
    if (ex_long->parsed()) return run_example_longitudinal(user, out);
    if (ex_orth->parsed()) return run_example_orthogonal(user, out);
    std::cerr << "evolab: no subcommand selected\n";
    return kExitError;
  } catch (const ContractViolation& e) {
    std::cerr << "evolab: configuration or precondition error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "evolab: execution error: " << e.what() << "\n";
    return kExitError;
  }
}
