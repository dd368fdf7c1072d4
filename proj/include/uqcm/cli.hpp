#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "uqcm/analysis.hpp"
#include "uqcm/validate.hpp"

namespace uqcm::cli {

/// Configuration problem: carries the offending field for the error message.
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string f, const std::string& message)
      : std::runtime_error("config error in '" + f + "': " + message), field(std::move(f)) {}
};

// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_validation_failure = 1;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_regime_violation = 3;

struct RunConfig {
  std::string tier = "effective";  // effective | full | lindblad

  // Exactly one input form must be present for `run`; sweeps fall back to the
  // equator state when none is given.
  bool has_bloch = false;
  double theta = 0.0, phi = 0.0;  // radians
  bool has_amplitudes = false;
  double alpha_re = 0.0, alpha_im = 0.0, beta_re = 0.0, beta_im = 0.0;

  double g_khz = 50.0;  // g / 2pi in kHz
  double delta_over_g = 20.0;
  int n_max = 3;
  double kappa_over_lambda = 0.0;
  double n_th = 0.0;
  double rel_tol = 1e-8;

  std::string parameter_set = "solver";  // solver | paper-printed | explicit
  bool has_explicit_params = false;
  ProtocolParams explicit_params;  // radians

  std::uint64_t seed = 20240817;
};

/// Flat key=value configuration file: one pair per line, '#' starts a
/// comment, blank lines ignored, whitespace around key and value trimmed.
inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::map<std::string, std::string> entries;
  std::string line;
  int line_no = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config", "line " + std::to_string(line_no) + " of '" + path + "' is not key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config", "empty key on line " + std::to_string(line_no) + " of '" + path + "'");
    entries[key] = trim(line.substr(eq + 1));
  }
  return entries;
}

inline double parse_double_value(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError(key, "'" + value + "' is not a number");
  }
  if (used != value.size()) throw ConfigError(key, "'" + value + "' is not a number");
  return v;
}

inline bool parse_bool_value(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  throw ConfigError(key, "'" + value + "' is not a boolean");
}

inline void validate_config(const RunConfig& c, bool require_input = true) {
  if (c.tier != "effective" && c.tier != "full" && c.tier != "lindblad")
    throw ConfigError("tier", "must be one of effective, full, lindblad");
  if (c.has_bloch && c.has_amplitudes)
    throw ConfigError("input", "give either Bloch angles or amplitudes, not both");
  if (require_input && !c.has_bloch && !c.has_amplitudes)
    throw ConfigError("input", "missing input qubit: give --theta/--phi or the four amplitude components");
  if (c.has_amplitudes) {
    const double n2 = c.alpha_re * c.alpha_re + c.alpha_im * c.alpha_im + c.beta_re * c.beta_re + c.beta_im * c.beta_im;
    if (std::abs(n2 - 1.0) > 1e-9)
      throw ConfigError("amplitudes", "|alpha|^2 + |beta|^2 = " + std::to_string(n2) + ", must be 1 within 1e-9");
  }
  if (c.g_khz <= 0.0) throw ConfigError("g-khz", "must be positive");
  if (c.delta_over_g <= 0.0) throw ConfigError("delta-over-g", "must be positive");
  if (c.n_max < 1) throw ConfigError("n-max", "must be >= 1");
  if (c.kappa_over_lambda < 0.0) throw ConfigError("kappa-over-lambda", "must be >= 0");
  if (c.n_th < 0.0) throw ConfigError("n-th", "must be >= 0");
  if (c.rel_tol <= 1e-13 || c.rel_tol >= 1e-3) throw ConfigError("rel-tol", "must lie in (1e-13, 1e-3)");
  if (c.parameter_set != "solver" && c.parameter_set != "paper-printed" && c.parameter_set != "paper" &&
      c.parameter_set != "explicit")
    throw ConfigError("param-set", "must be one of solver, paper-printed, explicit");
  if (c.parameter_set == "explicit" && !c.has_explicit_params)
    throw ConfigError("param-set", "explicit parameter set requires all seven angle/phase values");
}

inline InputQubit input_qubit_from(const RunConfig& c) {
  if (c.has_bloch) return InputQubit::from_bloch(c.theta, c.phi);
  if (c.has_amplitudes) {
    const cplx a(c.alpha_re, c.alpha_im), b(c.beta_re, c.beta_im);
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    return InputQubit(a / n, b / n);  // renormalize away the allowed 1e-9 slack
  }
  return InputQubit::from_bloch(std::numbers::pi / 2.0, 0.0);
}

/// Natural-unit parameters (g = 1) used for the simulation tiers.
inline PhysicalParams physical_from(const RunConfig& c) {
  PhysicalParams p;
  p.g = 1.0;
  p.delta = c.delta_over_g;
  p.n_max = c.n_max;
  p.kappa = c.kappa_over_lambda * p.lambda();
  p.n_th = c.n_th;
  return p;
}

inline double lambda_si(const RunConfig& c) {
  const double g = 2.0 * std::numbers::pi * c.g_khz * 1e3;
  return g / c.delta_over_g;  // g^2 / delta with delta = ratio * g
}

inline std::string canonical_parameter_set(const RunConfig& c) {
  return c.parameter_set == "paper" ? "paper-printed" : c.parameter_set;
}

inline ProtocolParams protocol_from(const RunConfig& c) {
  if (c.parameter_set == "paper" || c.parameter_set == "paper-printed") return paper_printed_params();
  if (c.parameter_set == "explicit") return c.explicit_params;
  return solve_phase_matching();
}

inline std::string format_sci(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.14e", x);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline void csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_field(fields[i]);
  }
  os << '\n';
}

inline nlohmann::ordered_json angles_json(const ProtocolParams& p) {
  return {{"phase_a", p.phase_a}, {"theta1", p.theta1}, {"theta2", p.theta2}, {"phase_b", p.phase_b},
          {"phase_c", p.phase_c}, {"theta3", p.theta3}, {"theta4", p.theta4}};
}

/// Executes one protocol run at the configured tier and writes the JSON
/// report. Regime violations propagate as exceptions for the frontend to map
/// onto exit code 3.
inline int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  validate_config(config);
  const InputQubit q = input_qubit_from(config);
  const ProtocolParams p = protocol_from(config);
  const std::string label = canonical_parameter_set(config);
  const double lam_si = lambda_si(config);
  const std::array<double, 3> stage_times_si = {p.phase_a / lam_si, p.phase_b / lam_si, p.phase_c / lam_si};

  CloneReport report;
  std::vector<std::string> warnings;
  if (config.tier == "effective") {
    report = clone_report(q, run_protocol_effective(q, p), label, 0.0, stage_times_si);
  } else if (config.tier == "full") {
    const FullRunResult run = run_protocol_full(q, physical_from(config), p, config.rel_tol);
    report = clone_report(q, run.final_state, label, run.total_leakage, stage_times_si);
    warnings = run.warnings;
  } else {
    const LindbladRunResult run = run_protocol_lindblad(q, physical_from(config), p, config.rel_tol);
    report = clone_report(q, run.final_rho, label, run.total_leakage, stage_times_si);
    warnings = run.warnings;
    warnings.push_back("open-system generator: standard single-mode cavity damping with rates kappa*(n_th+1) "
                       "and kappa*n_th, a modeling choice of this tool");
  }

  nlohmann::ordered_json j;
  j["tier"] = config.tier;
  j["parameter_set"] = report.parameter_set_label;
  j["angles"] = angles_json(p);
  j["fidelity_clone2"] = report.fidelity_clone2;
  j["fidelity_clone3"] = report.fidelity_clone3;
  j["target_overlap"] = report.target_overlap;
  j["leakage"] = report.leakage;
  j["stage_times_s"] = report.stage_times_s;
  j["total_time_s"] = report.total_time_s;
  j["seed"] = config.seed;
  if (!warnings.empty()) j["warnings"] = warnings;
  out << j.dump(2) << '\n';
  for (const auto& w : warnings) diag << "warning: " << w << '\n';
  return exit_ok;
}

inline int cmd_sweep_universality(const RunConfig& config, int n_theta, int n_phi, std::ostream& out) {
  validate_config(config, /*require_input=*/false);
  if (n_theta < 1) throw ConfigError("n-theta", "grid size must be >= 1");
  if (n_phi < 1) throw ConfigError("n-phi", "grid size must be >= 1");
  const ProtocolParams p = protocol_from(config);
  const UniversalityResult result = universality_sweep(bloch_grid(n_theta, n_phi), p, canonical_parameter_set(config));
  csv_row(out, {"row_type", "theta_rad", "phi_rad", "fidelity_clone2", "fidelity_clone3", "target_overlap",
                "fidelity_min", "fidelity_max", "fidelity_mean"});
  for (const auto& row : result.rows)
    csv_row(out, {"data", format_sci(row.point.theta), format_sci(row.point.phi),
                  format_sci(row.report.fidelity_clone2), format_sci(row.report.fidelity_clone3),
                  format_sci(row.report.target_overlap), "", "", ""});
  csv_row(out, {"summary", "", "", "", "", "", format_sci(result.summary.fidelity_min),
                format_sci(result.summary.fidelity_max), format_sci(result.summary.fidelity_mean)});
  return exit_ok;
}

inline int cmd_sweep_scaling(const RunConfig& config, const std::vector<double>& deltas, std::ostream& out) {
  validate_config(config, /*require_input=*/false);
  if (deltas.empty()) throw ConfigError("deltas", "scaling sweep needs at least one delta/g entry");
  const ProtocolParams p = protocol_from(config);
  const auto rows = dispersive_scaling_study(deltas, physical_from(config), p, config.rel_tol, input_qubit_from(config));
  csv_row(out, {"delta_over_g", "overlap", "infidelity", "leakage", "max_photon_population"});
  for (const auto& r : rows)
    csv_row(out, {format_sci(r.delta_over_g), format_sci(r.overlap), format_sci(r.infidelity),
                  format_sci(r.leakage), format_sci(r.max_photon_population)});
  return exit_ok;
}

inline int cmd_sweep_decoherence(const RunConfig& config, const std::vector<double>& kappas,
                                 const std::vector<double>& n_ths, std::ostream& out) {
  validate_config(config, /*require_input=*/false);
  if (kappas.empty()) throw ConfigError("kappas", "decoherence sweep needs at least one kappa/lambda entry");
  if (n_ths.empty()) throw ConfigError("n-ths", "decoherence sweep needs at least one n_th entry");
  const ProtocolParams p = protocol_from(config);
  const auto rows =
      decoherence_study(kappas, n_ths, physical_from(config), p, config.rel_tol, input_qubit_from(config));
  csv_row(out, {"kappa_over_lambda", "n_th", "fidelity_clone2", "fidelity_clone3", "target_overlap"});
  for (const auto& r : rows)
    csv_row(out, {format_sci(r.kappa_over_lambda), format_sci(r.n_th), format_sci(r.fidelity_clone2),
                  format_sci(r.fidelity_clone3), format_sci(r.target_overlap)});
  return exit_ok;
}

inline int cmd_validate(double perturb_phase, std::uint64_t seed, std::ostream& out) {
  const auto checks = validate_checks(perturb_phase, seed);
  bool all = true;
  out << "validation suite (seed " << seed << ")\n";
  for (const auto& c : checks) {
    out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name;
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << '\n';
    all = all && c.passed;
  }
  out << (all ? "all checks passed\n" : "CHECK FAILURES PRESENT\n");
  return all ? exit_ok : exit_validation_failure;
}

inline int cmd_feasibility(const FeasibilityBudget& budget, std::ostream& out) {
  const FeasibilityReport r = feasibility_report(budget, solve_phase_matching());
  out << "g/2pi = " << format_sci(budget.g_hz) << " Hz, delta = " << format_sci(budget.delta_over_g) << " g\n";
  out << "lambda = g^2/delta = " << format_sci(r.lambda_rad_s) << " rad/s\n";
  out << "pi*delta/g^2 = " << format_sci(r.single_collision_scale_s) << " s\n";
  out << "stage phases (lambda*t) = " << format_sci(r.stage_phases[0]) << ", " << format_sci(r.stage_phases[1])
      << ", " << format_sci(r.stage_phases[2]) << '\n';
  out << "stage times = " << format_sci(r.stage_times_s[0]) << ", " << format_sci(r.stage_times_s[1]) << ", "
      << format_sci(r.stage_times_s[2]) << " s\n";
  out << "total protocol time = " << format_sci(r.total_time_s) << " s\n";
  out << "total / radiative time (" << format_sci(budget.radiative_time_s)
      << " s) = " << format_sci(r.ratio_total_to_radiative) << '\n';
  out << "total / photon lifetime (" << format_sci(budget.photon_lifetime_s)
      << " s) = " << format_sci(r.ratio_total_to_photon_lifetime) << '\n';
  out << "time budget: " << (r.within_budget ? "PASS" : "FAIL") << '\n';
  return r.within_budget ? exit_ok : exit_validation_failure;
}

}  // namespace uqcm::cli
