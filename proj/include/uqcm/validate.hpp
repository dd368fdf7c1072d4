#pragma once

#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "uqcm/analysis.hpp"

namespace uqcm::cli {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", x);
  return buf;
}

inline std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.15f", x);
  return buf;
}

inline PureState random_state(const BasisLayout& layout, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(layout.total_dim());
  for (int i = 0; i < v.size(); ++i) v(i) = cplx(gauss(rng), gauss(rng));
  return PureState(layout, v / v.norm());
}

// Propagator matrix of a state map, column by column.
template <typename Map>
Matrix propagator_of(const BasisLayout& layout, Map&& map) {
  const int d = layout.total_dim();
  Matrix u(d, d);
  for (int c = 0; c < d; ++c) u.col(c) = map(basis_state(layout, c)).amplitudes;
  return u;
}

}  // namespace detail

/// Built-in cross-checks: closed-form collisions against the matrix-
/// exponential route, the protocol checkpoint states, the end-to-end target,
/// unitarity and conservation. perturb_phase shifts the cavity-A phase away
/// from pi/4 as a negative control; 0 is the production setting.
inline std::vector<CheckResult> validate_checks(double perturb_phase, std::uint64_t seed) {
  constexpr double pi = std::numbers::pi;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform_phase(0.0, 2.0 * pi);
  std::vector<CheckResult> checks;
  auto record = [&](const std::string& name, bool ok, const std::string& detail) {
    checks.push_back({name, ok, detail});
  };

  const BasisLayout three_atoms = BasisLayout::atoms(3);

  {  // Two-atom closed form vs exp(-iHt) of the pair Hamiltonian.
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const double phase = uniform_phase(rng);
      const PureState in = detail::random_state(three_atoms, rng);
      const PureState closed = collision_two_atom(in, 1, 2, phase);
      const PureState expm = evolve_exact(in, effective_hamiltonian_vacuum(1.0, 3, {1, 2}), phase);
      worst = std::max(worst, (closed.amplitudes - expm.amplitudes).cwiseAbs().maxCoeff());
    }
    record("two-atom collision vs matrix exponential (100 random)", worst <= 1e-12,
           "max deviation " + detail::sci(worst));
  }

  {  // Three-atom closed form vs exp(-iHt).
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const double phase = uniform_phase(rng);
      const PureState in = detail::random_state(three_atoms, rng);
      const PureState closed = collision_three_atom(in, 0, 1, 2, phase);
      const PureState expm = evolve_exact(in, effective_hamiltonian_vacuum(1.0, 3), phase);
      worst = std::max(worst, (closed.amplitudes - expm.amplitudes).cwiseAbs().maxCoeff());
    }
    record("three-atom collision vs matrix exponential (100 random)", worst <= 1e-12,
           "max deviation " + detail::sci(worst));
  }

  {  // Unitarity residuals of 100 random closed-form propagators.
    double worst = 0.0;
    const Matrix id = Matrix::Identity(8, 8);
    for (int trial = 0; trial < 100; ++trial) {
      const double phase = uniform_phase(rng);
      const Matrix u = trial % 2 == 0
                           ? detail::propagator_of(three_atoms, [&](const PureState& s) { return collision_two_atom(s, 1, 2, phase); })
                           : detail::propagator_of(three_atoms, [&](const PureState& s) { return collision_three_atom(s, 0, 1, 2, phase); });
      worst = std::max(worst, (u.adjoint() * u - id).cwiseAbs().maxCoeff());
    }
    record("unitarity residual over 100 random propagators", worst <= 1e-12, "max residual " + detail::sci(worst));
  }

  const double phase_a = pi / 4.0 + perturb_phase;

  {  // Checkpoint after cavity A: (|eg> - i|ge>)/sqrt(2) on atoms 1,2.
    const PureState in = tensor(ket_e(), ket_g());
    const PureState got = collision_two_atom(in, 0, 1, phase_a);
    Vector want(4);
    want << 0.0, cplx(0.0, -1.0 / std::sqrt(2.0)), 1.0 / std::sqrt(2.0), 0.0;
    const double overlap = overlap_up_to_global_phase(got, PureState(BasisLayout::atoms(2), want));
    record("cavity-A checkpoint state", overlap >= 1.0 - 1e-12, "overlap " + detail::fixed(overlap));
  }

  {  // Checkpoint after the theta2 = pi/4 rotation: |Psi+>.
    PureState s = collision_two_atom(tensor(ket_e(), ket_g()), 0, 1, phase_a);
    s = z_rotation(s, 0, pi / 4.0);
    Vector want(4);
    want << 0.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0;
    const double overlap = overlap_up_to_global_phase(s, PureState(BasisLayout::atoms(2), want));
    record("symmetric-state checkpoint after rotation", overlap >= 1.0 - 1e-12, "overlap " + detail::fixed(overlap));
  }

  {  // Cavity-B checkpoint magnitudes sqrt(1/3) / sqrt(2/3).
    Vector v = Vector::Zero(8);
    v(0b010) = 1.0 / std::sqrt(2.0);
    v(0b001) = 1.0 / std::sqrt(2.0);
    const PureState evolved = collision_three_atom(PureState(three_atoms, v), 0, 1, 2, 2.0 * pi / 9.0);
    const double mag_w = std::abs(evolved.amplitudes(0b100));
    const cplx psi_comp = (evolved.amplitudes(0b010) + evolved.amplitudes(0b001)) / std::sqrt(2.0);
    const double err = std::max(std::abs(mag_w - std::sqrt(2.0 / 3.0)), std::abs(std::abs(psi_comp) - std::sqrt(1.0 / 3.0)));
    record("cavity-B checkpoint magnitudes", err <= 1e-12, "max magnitude error " + detail::sci(err));
  }

  {  // End-to-end target overlap with solver parameters, 50 random inputs.
    const ProtocolParams p = solve_phase_matching();
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 1.0;
    for (int trial = 0; trial < 50; ++trial) {
      const InputQubit q = InputQubit::from_bloch(std::acos(2.0 * u01(rng) - 1.0), 2.0 * pi * u01(rng));
      worst = std::min(worst, overlap_up_to_global_phase(run_protocol_effective(q, p), target_state(q)));
    }
    record("end-to-end target state (50 random inputs)", worst >= 1.0 - 1e-10, "min overlap " + detail::fixed(worst));
  }

  {  // Excitation-sector conservation under the vacuum effective Hamiltonian.
    const HermitianOperator h = effective_hamiltonian_vacuum(1.0, 3);
    const HermitianOperator count = excited_count_operator(3);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const PureState in = detail::random_state(three_atoms, rng);
      const PureState out = evolve_exact(in, h, uniform_phase(rng));
      for (int sector = 0; sector <= 3; ++sector) {
        double before = 0.0, after = 0.0;
        for (int idx = 0; idx < 8; ++idx) {
          if (std::lround(count.matrix(idx, idx).real()) != sector) continue;
          before += std::norm(in.amplitudes(idx));
          after += std::norm(out.amplitudes(idx));
        }
        worst = std::max(worst, std::abs(after - before));
      }
    }
    record("excitation-sector population conservation", worst <= 1e-12, "max drift " + detail::sci(worst));
  }

  {  // Clone fidelity 5/6 on a few inputs.
    const ProtocolParams p = solve_phase_matching();
    double worst = 0.0;
    for (double theta : {0.0, pi / 2.0, 2.0}) {
      const InputQubit q = InputQubit::from_bloch(theta, 0.7);
      const CloneReport r = clone_report(q, run_protocol_effective(q, p));
      worst = std::max({worst, std::abs(r.fidelity_clone2 - 5.0 / 6.0), std::abs(r.fidelity_clone3 - 5.0 / 6.0)});
    }
    record("clone fidelity 5/6", worst <= 1e-9, "max deviation " + detail::sci(worst));
  }

  return checks;
}

}  // namespace uqcm::cli
