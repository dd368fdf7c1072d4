// Command-line front end: one-shot protocol runs, parameter sweeps, the
// built-in validation suite, and the experimental time-budget calculator.

#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>

#include "CLI11.hpp"
#include "uqcm/cli.hpp"

namespace {

using uqcm::cli::ConfigError;
using uqcm::cli::RunConfig;

// Maps flat config-file keys onto the same targets the CLI flags write to.
// Command-line flags take precedence; file values fill in anything unset.
struct OptionTable {
  struct Entry {
    CLI::Option* opt = nullptr;
    std::function<void(const std::string& key, const std::string& value)> set;
  };
  std::map<std::string, Entry> entries;
  std::set<std::string> from_file;

  void bind(const std::string& key, CLI::Option* opt, double* target) {
    entries[key] = {opt, [target](const std::string& k, const std::string& v) {
                      *target = uqcm::cli::parse_double_value(k, v);
                    }};
  }
  void bind(const std::string& key, CLI::Option* opt, int* target) {
    entries[key] = {opt, [target](const std::string& k, const std::string& v) {
                      *target = static_cast<int>(uqcm::cli::parse_double_value(k, v));
                    }};
  }
  void bind(const std::string& key, CLI::Option* opt, std::uint64_t* target) {
    entries[key] = {opt, [target](const std::string& k, const std::string& v) {
                      *target = static_cast<std::uint64_t>(uqcm::cli::parse_double_value(k, v));
                    }};
  }
  void bind(const std::string& key, CLI::Option* opt, std::string* target) {
    entries[key] = {opt, [target](const std::string&, const std::string& v) { *target = v; }};
  }
  void bind_flag(const std::string& key, CLI::Option* opt, bool* target) {
    entries[key] = {opt, [target](const std::string& k, const std::string& v) {
                      *target = uqcm::cli::parse_bool_value(k, v);
                    }};
  }

  void apply_file(const std::string& path) {
    for (const auto& [key, value] : uqcm::cli::parse_config_file(path)) {
      const auto it = entries.find(key);
      if (it == entries.end()) throw ConfigError(key, "unknown config key");
      if (it->second.opt->count() > 0) continue;  // command line wins
      it->second.set(key, value);
      from_file.insert(key);
    }
  }

  bool given(const std::string& key) const {
    const auto it = entries.find(key);
    return (it != entries.end() && it->second.opt->count() > 0) || from_file.count(key) > 0;
  }
};

struct CommandState {
  RunConfig config;
  bool radians = false;
  std::string config_path;
  std::string out_path = "-";
  OptionTable table;
};

void add_common_options(CLI::App* cmd, CommandState& st) {
  auto& t = st.table;
  cmd->add_option("--config", st.config_path, "flat key=value config file (# comments allowed)");
  t.bind_flag("radians", cmd->add_flag("--radians", st.radians, "interpret angles in radians instead of units of pi"),
              &st.radians);

  t.bind("theta", cmd->add_option("--theta", st.config.theta, "input qubit polar angle"), &st.config.theta);
  t.bind("phi", cmd->add_option("--phi", st.config.phi, "input qubit azimuthal angle"), &st.config.phi);
  t.bind("alpha-re", cmd->add_option("--alpha-re", st.config.alpha_re, "input amplitude Re(alpha)"),
         &st.config.alpha_re);
  t.bind("alpha-im", cmd->add_option("--alpha-im", st.config.alpha_im, "input amplitude Im(alpha)"),
         &st.config.alpha_im);
  t.bind("beta-re", cmd->add_option("--beta-re", st.config.beta_re, "input amplitude Re(beta)"), &st.config.beta_re);
  t.bind("beta-im", cmd->add_option("--beta-im", st.config.beta_im, "input amplitude Im(beta)"), &st.config.beta_im);

  t.bind("g-khz", cmd->add_option("--g-khz", st.config.g_khz, "atom-cavity coupling g/2pi in kHz")->capture_default_str(),
         &st.config.g_khz);
  t.bind("delta-over-g",
         cmd->add_option("--delta-over-g", st.config.delta_over_g, "detuning as a multiple of g")->capture_default_str(),
         &st.config.delta_over_g);
  t.bind("n-max", cmd->add_option("--n-max", st.config.n_max, "cavity Fock truncation")->capture_default_str(),
         &st.config.n_max);
  t.bind("kappa-over-lambda",
         cmd->add_option("--kappa-over-lambda", st.config.kappa_over_lambda,
                         "cavity decay rate as a multiple of lambda")->capture_default_str(),
         &st.config.kappa_over_lambda);
  t.bind("n-th", cmd->add_option("--n-th", st.config.n_th, "thermal cavity occupation")->capture_default_str(),
         &st.config.n_th);
  t.bind("rel-tol",
         cmd->add_option("--rel-tol", st.config.rel_tol, "integrator relative tolerance")->capture_default_str(),
         &st.config.rel_tol);
  t.bind("param-set",
         cmd->add_option("--param-set", st.config.parameter_set,
                         "protocol parameters: solver, paper-printed, or explicit")->capture_default_str(),
         &st.config.parameter_set);
  t.bind("seed",
         cmd->add_option("--seed", st.config.seed, "seed recorded in reports and used by randomized checks")
             ->capture_default_str(),
         &st.config.seed);
  t.bind("out", cmd->add_option("--out", st.out_path, "output path, '-' for stdout")->capture_default_str(),
         &st.out_path);

  auto& e = st.config.explicit_params;
  t.bind("phase-a", cmd->add_option("--phase-a", e.phase_a, "explicit cavity-A phase lambda*t"), &e.phase_a);
  t.bind("theta1", cmd->add_option("--theta1", e.theta1, "explicit rotation angle theta1"), &e.theta1);
  t.bind("theta2", cmd->add_option("--theta2", e.theta2, "explicit rotation angle theta2"), &e.theta2);
  t.bind("phase-b", cmd->add_option("--phase-b", e.phase_b, "explicit cavity-B phase lambda*t"), &e.phase_b);
  t.bind("phase-c", cmd->add_option("--phase-c", e.phase_c, "explicit cavity-C phase lambda*tau"), &e.phase_c);
  t.bind("theta3", cmd->add_option("--theta3", e.theta3, "explicit rotation angle theta3"), &e.theta3);
  t.bind("theta4", cmd->add_option("--theta4", e.theta4, "explicit rotation angle theta4"), &e.theta4);
}

// Merges the config file (if any), detects which input form was supplied, and
// converts angle units. Called after CLI11 parsing succeeds.
void finalize(CommandState& st) {
  if (!st.config_path.empty()) st.table.apply_file(st.config_path);

  auto& c = st.config;
  c.has_bloch = st.table.given("theta") || st.table.given("phi");

  const int amp_count = st.table.given("alpha-re") + st.table.given("alpha-im") + st.table.given("beta-re") +
                        st.table.given("beta-im");
  if (amp_count > 0 && amp_count < 4)
    throw ConfigError("amplitudes", "all four of alpha-re/alpha-im/beta-re/beta-im are required");
  c.has_amplitudes = amp_count == 4;

  const char* explicit_keys[] = {"phase-a", "theta1", "theta2", "phase-b", "phase-c", "theta3", "theta4"};
  int explicit_count = 0;
  for (const char* k : explicit_keys) explicit_count += st.table.given(k);
  if (explicit_count > 0 && explicit_count < 7)
    throw ConfigError("param-set", "explicit parameter set requires all seven angle/phase values");
  c.has_explicit_params = explicit_count == 7;

  const double scale = st.radians ? 1.0 : std::numbers::pi;
  if (c.has_bloch) {
    c.theta *= scale;
    c.phi *= scale;
  }
  if (c.has_explicit_params) {
    auto& e = c.explicit_params;
    e.phase_a *= scale;
    e.theta1 *= scale;
    e.theta2 *= scale;
    e.phase_b *= scale;
    e.phase_c *= scale;
    e.theta3 *= scale;
    e.theta4 *= scale;
  }
}

// Opens --out for writing, or hands back stdout for "-".
std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path == "-") return std::cout;
  file.open(path);
  if (!file) throw ConfigError("out", "cannot open '" + path + "' for writing");
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cavity-mediated 1->2 universal quantum cloning simulator"};
  app.require_subcommand(1);

  CommandState run_state, sweep_state;

  auto* run = app.add_subcommand("run", "execute one protocol run and write a JSON report");
  add_common_options(run, run_state);
  run_state.table.bind("tier",
                       run->add_option("--tier", run_state.config.tier, "model tier: effective, full, or lindblad")
                           ->capture_default_str(),
                       &run_state.config.tier);

  auto* sweep = app.add_subcommand("sweep", "parameter sweeps, written as CSV");
  sweep->require_subcommand(1);
  add_common_options(sweep, sweep_state);

  int n_theta = 10, n_phi = 20;
  auto* universality = sweep->add_subcommand("universality", "clone fidelity over a Bloch-angle grid");
  universality->fallthrough();
  universality->add_option("--n-theta", n_theta, "polar grid size")->capture_default_str();
  universality->add_option("--n-phi", n_phi, "azimuthal grid size")->capture_default_str();

  std::vector<double> deltas = {20.0, 40.0, 80.0, 160.0, 200.0};
  auto* scaling = sweep->add_subcommand("scaling", "full-model infidelity and leakage vs detuning");
  scaling->fallthrough();
  scaling->add_option("--deltas", deltas, "delta/g values")->capture_default_str();

  std::vector<double> kappas = {0.0, 0.01, 0.05, 0.1};
  std::vector<double> n_ths = {0.0};
  auto* decoherence = sweep->add_subcommand("decoherence", "clone fidelity vs cavity decay and thermal occupation");
  decoherence->fallthrough();
  decoherence->add_option("--kappas", kappas, "kappa/lambda values")->capture_default_str();
  decoherence->add_option("--n-ths", n_ths, "thermal occupations")->capture_default_str();

  double perturb_phase = 0.0;
  std::uint64_t validate_seed = 20240817;
  auto* validate = app.add_subcommand("validate", "run the built-in cross-check suite");
  validate->add_option("--perturb-phase-a", perturb_phase,
                       "shift the cavity-A checkpoint phase by this many radians (negative control)")
      ->capture_default_str();
  validate->add_option("--seed", validate_seed, "seed for the randomized checks")->capture_default_str();

  uqcm::FeasibilityBudget budget;
  budget.g_hz = 50.0;  // the flag takes kHz; scaled to Hz after parsing
  auto* feasibility = app.add_subcommand("feasibility", "experimental time-budget arithmetic");
  feasibility->add_option("--g-khz", budget.g_hz, "coupling g/2pi in kHz")->capture_default_str();
  feasibility->add_option("--delta-over-g", budget.delta_over_g, "detuning as a multiple of g")->capture_default_str();
  feasibility->add_option("--radiative-time-s", budget.radiative_time_s, "atomic radiative lifetime budget in s")
      ->capture_default_str();
  feasibility->add_option("--photon-lifetime-s", budget.photon_lifetime_s, "cavity photon lifetime in s")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : uqcm::cli::exit_config_error;
  }

  try {
    std::ofstream file;
    if (run->parsed()) {
      finalize(run_state);
      return uqcm::cli::cmd_run(run_state.config, open_output(run_state.out_path, file), std::cerr);
    }
    if (sweep->parsed()) {
      finalize(sweep_state);
      std::ostream& out = open_output(sweep_state.out_path, file);
      if (universality->parsed()) return uqcm::cli::cmd_sweep_universality(sweep_state.config, n_theta, n_phi, out);
      if (scaling->parsed()) return uqcm::cli::cmd_sweep_scaling(sweep_state.config, deltas, out);
      return uqcm::cli::cmd_sweep_decoherence(sweep_state.config, kappas, n_ths, out);
    }
    if (validate->parsed()) return uqcm::cli::cmd_validate(perturb_phase, validate_seed, std::cout);
    if (feasibility->parsed()) {
      budget.g_hz *= 1e3;  // flag is in kHz
      return uqcm::cli::cmd_feasibility(budget, std::cout);
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return uqcm::cli::exit_config_error;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return uqcm::cli::exit_config_error;
  } catch (const uqcm::RegimeViolation& e) {
    std::cerr << "regime violation: " << e.what() << '\n';
    return uqcm::cli::exit_regime_violation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return uqcm::cli::exit_validation_failure;
  }
  return uqcm::cli::exit_config_error;
}
