#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "uqcm/protocol.hpp"

namespace uqcm {

/// Quantitative summary of one protocol run: how well each clone matches the
/// input, how close the joint state is to the target, and what it cost.
struct CloneReport {
  double fidelity_clone2 = 0.0;  // <q| rho_atom1 |q>  (first clone, physical atom 2)
  double fidelity_clone3 = 0.0;  // <q| rho_atom2 |q>  (second clone, physical atom 3)
  double target_overlap = 0.0;   // phase-insensitive overlap with the target state
  double leakage = 0.0;
  std::array<double, 3> stage_times_s{};
  double total_time_s = 0.0;
  std::string parameter_set_label;
};

inline CloneReport clone_report(const InputQubit& q, const PureState& final_state,
                                const std::string& label = "unspecified",
                                double leakage = 0.0, const std::array<double, 3>& stage_times = {}) {
  if (final_state.layout != BasisLayout::atoms(3))
    throw std::invalid_argument("clone_report: expected a 3-atom state");
  const DensityMatrix rho = pure_to_density(final_state);
  const PureState input = q.to_state();
  CloneReport r;
  r.fidelity_clone2 = fidelity_pure(partial_trace(rho, {1}), input);
  r.fidelity_clone3 = fidelity_pure(partial_trace(rho, {2}), input);
  r.target_overlap = overlap_up_to_global_phase(final_state, target_state(q));
  r.leakage = leakage;
  r.stage_times_s = stage_times;
  r.total_time_s = stage_times[0] + stage_times[1] + stage_times[2];
  r.parameter_set_label = label;
  return r;
}

inline CloneReport clone_report(const InputQubit& q, const DensityMatrix& final_rho,
                                const std::string& label = "unspecified",
                                double leakage = 0.0, const std::array<double, 3>& stage_times = {}) {
  if (final_rho.layout != BasisLayout::atoms(3))
    throw std::invalid_argument("clone_report: expected a 3-atom density matrix");
  const PureState input = q.to_state();
  CloneReport r;
  r.fidelity_clone2 = fidelity_pure(partial_trace(final_rho, {1}), input);
  r.fidelity_clone3 = fidelity_pure(partial_trace(final_rho, {2}), input);
  r.target_overlap = std::sqrt(std::max(0.0, fidelity_pure(final_rho, target_state(q))));
  r.leakage = leakage;
  r.stage_times_s = stage_times;
  r.total_time_s = stage_times[0] + stage_times[1] + stage_times[2];
  r.parameter_set_label = label;
  return r;
}

struct BlochGridPoint {
  double theta = 0.0;
  double phi = 0.0;
};

/// Uniformly spaced polar/azimuthal grid; constancy of the clone fidelity
/// makes the sampling measure irrelevant.
inline std::vector<BlochGridPoint> bloch_grid(int n_theta, int n_phi) {
  if (n_theta < 1 || n_phi < 1) throw std::invalid_argument("bloch_grid: grid sizes must be >= 1");
  constexpr double pi = std::numbers::pi;
  std::vector<BlochGridPoint> grid;
  grid.reserve(static_cast<std::size_t>(n_theta) * static_cast<std::size_t>(n_phi));
  for (int i = 0; i < n_theta; ++i)
    for (int j = 0; j < n_phi; ++j)
      grid.push_back({n_theta == 1 ? 0.0 : pi * i / (n_theta - 1), 2.0 * pi * j / n_phi});
  return grid;
}

struct UniversalityRow {
  BlochGridPoint point;
  CloneReport report;
};

struct UniversalitySummary {
  double fidelity_min = 0.0;
  double fidelity_max = 0.0;
  double fidelity_mean = 0.0;
};

struct UniversalityResult {
  std::vector<UniversalityRow> rows;
  UniversalitySummary summary;
};

/// Effective-tier clone fidelity over a Bloch grid; the summary pools both
/// clone columns.
inline UniversalityResult universality_sweep(const std::vector<BlochGridPoint>& grid, const ProtocolParams& p,
                                             const std::string& label = "solver") {
  if (grid.empty()) throw std::invalid_argument("universality_sweep: empty grid");
  UniversalityResult result;
  result.rows.reserve(grid.size());
  double lo = 1.0, hi = 0.0, acc = 0.0;
  for (const auto& pt : grid) {
    const InputQubit q = InputQubit::from_bloch(pt.theta, pt.phi);
    CloneReport r = clone_report(q, run_protocol_effective(q, p), label);
    lo = std::min({lo, r.fidelity_clone2, r.fidelity_clone3});
    hi = std::max({hi, r.fidelity_clone2, r.fidelity_clone3});
    acc += 0.5 * (r.fidelity_clone2 + r.fidelity_clone3);
    result.rows.push_back({pt, std::move(r)});
  }
  result.summary = {lo, hi, acc / static_cast<double>(grid.size())};
  return result;
}

struct ScalingRow {
  double delta_over_g = 0.0;
  double overlap = 0.0;     // full-model final vs effective-model final
  double infidelity = 0.0;  // 1 - overlap^2
  double leakage = 0.0;
  double max_photon_population = 0.0;
};

/// Full-model vs effective-model disagreement as the detuning grows at fixed
/// collision phases. Every list entry must sit in the dispersive regime
/// (delta/g >= 5). The effective model predicts the cavity returns exactly to
/// vacuum, so the overlap uses the unrenormalized vacuum-sector amplitude:
/// photon weight left behind counts as infidelity.
inline std::vector<ScalingRow> dispersive_scaling_study(const std::vector<double>& delta_over_g_list,
                                                        const PhysicalParams& base, const ProtocolParams& p,
                                                        double rel_tol,
                                                        const InputQubit& q = InputQubit::from_bloch(std::numbers::pi / 2.0, 0.0)) {
  for (double r : delta_over_g_list)
    if (r < 5.0) throw std::invalid_argument("dispersive_scaling_study: delta/g entries must be >= 5");
  const PureState effective = run_protocol_effective(q, p);
  std::vector<ScalingRow> rows;
  rows.reserve(delta_over_g_list.size());
  for (double ratio : delta_over_g_list) {
    PhysicalParams params = base;
    params.delta = ratio * params.g;
    const FullRunResult full = run_protocol_full(q, params, p, rel_tol);
    ScalingRow row;
    row.delta_over_g = ratio;
    row.overlap = std::sqrt(std::max(0.0, 1.0 - full.total_leakage)) *
                  overlap_up_to_global_phase(full.final_state, effective);
    row.infidelity = 1.0 - row.overlap * row.overlap;
    row.leakage = full.total_leakage;
    row.max_photon_population = full.max_photon_population;
    rows.push_back(row);
  }
  return rows;
}

struct DecoherenceRow {
  double kappa_over_lambda = 0.0;
  double n_th = 0.0;
  double fidelity_clone2 = 0.0;
  double fidelity_clone3 = 0.0;
  double target_overlap = 0.0;
};

/// Clone fidelity degradation under cavity damping and thermal excitation.
/// The master-equation generator is the standard single-mode damping choice;
/// the modeled scheme never really populates the cavity, which is what these
/// numbers probe.
inline std::vector<DecoherenceRow> decoherence_study(const std::vector<double>& kappa_over_lambda_list,
                                                     const std::vector<double>& n_th_list,
                                                     const PhysicalParams& base, const ProtocolParams& p,
                                                     double rel_tol,
                                                     const InputQubit& q = InputQubit::from_bloch(std::numbers::pi / 2.0, 0.0)) {
  for (double k : kappa_over_lambda_list)
    if (k < 0.0) throw std::invalid_argument("decoherence_study: kappa/lambda must be >= 0");
  for (double n : n_th_list)
    if (n < 0.0) throw std::invalid_argument("decoherence_study: n_th must be >= 0");
  std::vector<DecoherenceRow> rows;
  rows.reserve(kappa_over_lambda_list.size() * n_th_list.size());
  for (double n_th : n_th_list)
    for (double k_ratio : kappa_over_lambda_list) {
      PhysicalParams params = base;
      params.kappa = k_ratio * params.lambda();
      params.n_th = n_th;
      const LindbladRunResult run = run_protocol_lindblad(q, params, p, rel_tol);
      const CloneReport r = clone_report(q, run.final_rho, "lindblad", run.total_leakage, run.stage_times_s);
      rows.push_back({k_ratio, n_th, r.fidelity_clone2, r.fidelity_clone3, r.target_overlap});
    }
  return rows;
}

/// Experimental time budget, in the units the numbers are usually quoted in:
/// coupling as g/2pi in Hz, detuning as a multiple of g.
struct FeasibilityBudget {
  double g_hz = 50e3;
  double delta_over_g = 10.0;
  double radiative_time_s = 3e-2;
  double photon_lifetime_s = 1e-3;

  void validate() const {
    if (g_hz <= 0.0 || delta_over_g <= 0.0 || radiative_time_s <= 0.0 || photon_lifetime_s <= 0.0)
      throw std::invalid_argument("FeasibilityBudget: all entries must be positive");
  }
};

struct FeasibilityReport {
  double lambda_rad_s = 0.0;
  double single_collision_scale_s = 0.0;  // pi/lambda = pi*delta/g^2
  std::array<double, 3> stage_phases{};
  std::array<double, 3> stage_times_s{};
  double total_time_s = 0.0;
  double ratio_total_to_radiative = 0.0;
  double ratio_total_to_photon_lifetime = 0.0;
  bool within_budget = false;
};

/// Pure arithmetic; identical inputs give bit-identical output.
inline FeasibilityReport feasibility_report(const FeasibilityBudget& budget, const ProtocolParams& p) {
  budget.validate();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double g = two_pi * budget.g_hz;
  const double delta = budget.delta_over_g * g;
  FeasibilityReport r;
  r.lambda_rad_s = g * g / delta;
  r.single_collision_scale_s = std::numbers::pi * delta / (g * g);
  r.stage_phases = p.collision_phases();
  for (int i = 0; i < 3; ++i) r.stage_times_s[static_cast<std::size_t>(i)] = r.stage_phases[static_cast<std::size_t>(i)] / r.lambda_rad_s;
  r.total_time_s = r.stage_times_s[0] + r.stage_times_s[1] + r.stage_times_s[2];
  r.ratio_total_to_radiative = r.total_time_s / budget.radiative_time_s;
  r.ratio_total_to_photon_lifetime = r.total_time_s / budget.photon_lifetime_s;
  r.within_budget = r.total_time_s < std::min(budget.radiative_time_s, budget.photon_lifetime_s);
  return r;
}

}  // namespace uqcm
