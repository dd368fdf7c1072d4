#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "uqcm/hamiltonian.hpp"

namespace uqcm {

/// exp(-i H t) |psi> via eigendecomposition of the (time-independent) H.
inline PureState evolve_exact(const PureState& state, const HermitianOperator& h, double t) {
  if (h.layout != state.layout)
    throw std::invalid_argument("evolve_exact: layout mismatch " + h.layout.to_string() + " vs " + state.layout.to_string());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix);
  if (es.info() != Eigen::Success) throw std::runtime_error("evolve_exact: eigendecomposition failed");
  const Vector coeffs = es.eigenvectors().adjoint() * state.amplitudes;
  Vector rotated(coeffs.size());
  for (int k = 0; k < coeffs.size(); ++k)
    rotated(k) = coeffs(k) * std::polar(1.0, -es.eigenvalues()(k) * t);
  return PureState(state.layout, es.eigenvectors() * rotated);
}

/// Closed-form cavity-assisted collision of two atoms, phase = lambda*t:
///   |gg> -> |gg>
///   |ee> -> e^{-2i phase} |ee>
///   |eg> -> e^{-i phase} [cos(phase)|eg> - i sin(phase)|ge>]   (and g<->e symmetric)
/// Acts as the identity on every other factor of the layout.
inline PureState collision_two_atom(const PureState& state, int atom_i, int atom_j, double phase) {
  if (atom_i == atom_j) throw std::invalid_argument("collision_two_atom: atoms must be distinct");
  const auto& lay = state.layout;
  lay.check_factor(atom_i);
  lay.check_factor(atom_j);
  if (lay.dim(atom_i) != 2 || lay.dim(atom_j) != 2)
    throw std::invalid_argument("collision_two_atom: designated factors must be qubits");

  const cplx ph1 = std::polar(1.0, -phase);
  const cplx ph2 = std::polar(1.0, -2.0 * phase);
  const cplx c = std::cos(phase);
  const cplx ms = cplx(0.0, -1.0) * std::sin(phase);

  Vector out = state.amplitudes;
  for (int idx = 0; idx < out.size(); ++idx) {
    const int bi = lay.digit(idx, atom_i);
    const int bj = lay.digit(idx, atom_j);
    if (bi == 1 && bj == 1) {
      out(idx) *= ph2;
    } else if (bi == 1 && bj == 0) {
      // Handle the (eg, ge) pair once, from the eg side.
      const int swapped = lay.with_digit(lay.with_digit(idx, atom_i, 0), atom_j, 1);
      const cplx a_eg = state.amplitudes(idx);
      const cplx a_ge = state.amplitudes(swapped);
      out(idx) = ph1 * (c * a_eg + ms * a_ge);
      out(swapped) = ph1 * (c * a_ge + ms * a_eg);
    }
  }
  return PureState(lay, std::move(out));
}

/// Closed-form three-atom collision (phase = lambda*t), exact on the full
/// eight-dimensional space of the designated atoms. Sector structure of the
/// vacuum Hamiltonian: with J the all-ones 3x3 matrix over the single- or
/// double-excitation basis states, H/lambda acts as J (one excitation) and
/// I + J (two excitations), so with u = (e^{-3i phase} - 1)/3:
///   n=0: identity
///   n=1: x -> x + u (sum x) 1
///   n=2: x -> e^{-i phase} [x + u (sum x) 1]
///   n=3: x -> e^{-3i phase} x
inline PureState collision_three_atom(const PureState& state, int atom_i, int atom_j, int atom_k, double phase) {
  if (atom_i == atom_j || atom_i == atom_k || atom_j == atom_k)
    throw std::invalid_argument("collision_three_atom: atoms must be distinct");
  const auto& lay = state.layout;
  const int atoms[3] = {atom_i, atom_j, atom_k};
  for (int a : atoms) {
    lay.check_factor(a);
    if (lay.dim(a) != 2) throw std::invalid_argument("collision_three_atom: designated factors must be qubits");
  }

  const cplx u = (std::polar(1.0, -3.0 * phase) - 1.0) / 3.0;
  const cplx ph1 = std::polar(1.0, -phase);
  const cplx ph3 = std::polar(1.0, -3.0 * phase);

  // One- and two-excitation configurations of three qubits, as bit triples.
  static constexpr int one_exc[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  static constexpr int two_exc[3][3] = {{1, 1, 0}, {1, 0, 1}, {0, 1, 1}};

  Vector out = state.amplitudes;
  for (int idx = 0; idx < out.size(); ++idx) {
    // Visit each spectator configuration once, via its all-g representative.
    if (lay.digit(idx, atom_i) != 0 || lay.digit(idx, atom_j) != 0 || lay.digit(idx, atom_k) != 0) continue;

    auto member = [&](const int bits[3]) {
      int m = idx;
      for (int a = 0; a < 3; ++a) m = lay.with_digit(m, atoms[a], bits[a]);
      return m;
    };
    auto mix_sector = [&](const int (&config)[3][3], cplx outer) {
      cplx sum = 0.0;
      for (int r = 0; r < 3; ++r) sum += state.amplitudes(member(config[r]));
      for (int r = 0; r < 3; ++r) {
        const int m = member(config[r]);
        out(m) = outer * (state.amplitudes(m) + u * sum);
      }
    };

    mix_sector(one_exc, 1.0);
    mix_sector(two_exc, ph1);
    const int all_e[3] = {1, 1, 1};
    out(member(all_e)) = ph3 * state.amplitudes(member(all_e));
  }
  return PureState(lay, std::move(out));
}

}  // namespace uqcm
