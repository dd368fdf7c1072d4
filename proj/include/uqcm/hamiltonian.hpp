#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "uqcm/operators.hpp"

namespace uqcm {

/// Physical knobs of the atom-cavity model. All rates are angular
/// frequencies; n_max is the cavity Fock truncation.
struct PhysicalParams {
  double g = 1.0;
  double delta = 20.0;
  int n_max = 3;
  double kappa = 0.0;
  double n_th = 0.0;

  double lambda() const {
    if (delta <= 0.0) throw std::domain_error("PhysicalParams: lambda = g^2/delta needs delta > 0");
    return g * g / delta;
  }

  // Dispersive tier is trusted when delta >= 10 g sqrt(n_max+1).
  bool dispersive_regime_ok() const { return g > 0.0 && delta >= 10.0 * g * std::sqrt(n_max + 1.0); }

  // g = 0 and delta = 0 are allowed for the raw evolution operations (trivial
  // and resonant limits); the protocol runners additionally require both > 0.
  void validate() const {
    if (g < 0.0) throw std::invalid_argument("PhysicalParams: g must be >= 0");
    if (delta < 0.0) throw std::invalid_argument("PhysicalParams: delta must be >= 0");
    if (n_max < 1) throw std::invalid_argument("PhysicalParams: n_max must be >= 1");
    if (kappa < 0.0) throw std::invalid_argument("PhysicalParams: kappa must be >= 0");
    if (n_th < 0.0) throw std::invalid_argument("PhysicalParams: n_th must be >= 0");
  }
};

/// One cavity-mediated collision: which atoms participate and for how long,
/// expressed as the dimensionless phase lambda*t.
struct CollisionSpec {
  std::vector<int> atom_indices;
  double duration_phase = 0.0;

  void validate() const {
    if (atom_indices.size() < 2) throw std::invalid_argument("CollisionSpec: needs at least 2 atoms");
    if (duration_phase < 0.0) throw std::invalid_argument("CollisionSpec: duration_phase must be >= 0");
  }
};

namespace detail {

inline std::vector<int> all_atoms(int n_atoms) {
  std::vector<int> v(static_cast<std::size_t>(n_atoms));
  for (int j = 0; j < n_atoms; ++j) v[static_cast<std::size_t>(j)] = j;
  return v;
}

inline void check_atoms(const std::vector<int>& atoms, int n_atoms) {
  for (int j : atoms)
    if (j < 0 || j >= n_atoms) throw std::invalid_argument("atom index out of range");
}

}  // namespace detail

/// g * sum_j a^dag sigma_-^j over the listed atoms, on the atoms (x) cavity
/// layout. This is the coefficient of e^{-i delta t} in the interaction-
/// picture Hamiltonian; its adjoint carries e^{+i delta t}.
inline Matrix coupling_matrix(const PhysicalParams& params, int n_atoms, const std::vector<int>& active_atoms) {
  params.validate();
  if (n_atoms < 1) throw std::invalid_argument("coupling_matrix: n_atoms must be >= 1");
  detail::check_atoms(active_atoms, n_atoms);
  const BasisLayout layout = BasisLayout::atoms_and_cavity(n_atoms, params.n_max);
  const int cavity = n_atoms;
  const Matrix adag = embed(fock_create(params.n_max + 1), layout, cavity);
  Matrix m = Matrix::Zero(layout.total_dim(), layout.total_dim());
  for (int j : active_atoms) m += adag * embed(sigma_minus(), layout, j);
  return params.g * m;
}

/// Interaction-picture Hamiltonian at time t:
///   g sum_j (e^{-i delta t} a^dag sigma_-^j + e^{+i delta t} a sigma_+^j).
inline HermitianOperator full_hamiltonian(const PhysicalParams& params, int n_atoms, double t,
                                          const std::vector<int>& active_atoms) {
  const Matrix m_plus = coupling_matrix(params, n_atoms, active_atoms);
  const cplx phase = std::polar(1.0, -params.delta * t);
  Matrix h = phase * m_plus;
  h += (std::conj(phase) * m_plus.adjoint()).eval();
  return HermitianOperator(BasisLayout::atoms_and_cavity(n_atoms, params.n_max), std::move(h));
}

inline HermitianOperator full_hamiltonian(const PhysicalParams& params, int n_atoms, double t) {
  return full_hamiltonian(params, n_atoms, t, detail::all_atoms(n_atoms));
}

/// Coarse-grained dispersive Hamiltonian with the cavity factor retained:
///   lambda [ sum_j (|e_j><e_j| a a^dag - |g_j><g_j| a^dag a)
///            + sum_{j != k} sigma_+^j sigma_-^k ],
/// the j != k sum running over both ordered pairs. The a a^dag Stark shift
/// is built as n+1 on every Fock level (the untruncated value) rather than
/// as a product of truncated ladder matrices.
inline HermitianOperator effective_hamiltonian_general(const PhysicalParams& params, int n_atoms) {
  params.validate();
  if (n_atoms < 1) throw std::invalid_argument("effective_hamiltonian_general: n_atoms must be >= 1");
  const BasisLayout layout = BasisLayout::atoms_and_cavity(n_atoms, params.n_max);
  const int cavity = n_atoms;
  const int fock_dim = params.n_max + 1;
  const Matrix number = embed(fock_number(fock_dim), layout, cavity);
  const Matrix number_plus_one = number + Matrix::Identity(layout.total_dim(), layout.total_dim());

  Matrix h = Matrix::Zero(layout.total_dim(), layout.total_dim());
  for (int j = 0; j < n_atoms; ++j) {
    h += embed(project_e(), layout, j) * number_plus_one;
    h -= embed(project_g(), layout, j) * number;
  }
  for (int j = 0; j < n_atoms; ++j)
    for (int k = 0; k < n_atoms; ++k)
      if (j != k) h += embed(sigma_plus(), layout, j) * embed(sigma_minus(), layout, k);
  return HermitianOperator(layout, params.lambda() * h);
}

/// Vacuum-sector effective Hamiltonian on the listed atoms (no cavity factor):
///   lambda [ sum_j |e_j><e_j| + sum_{j != k} sigma_+^j sigma_-^k ].
inline HermitianOperator effective_hamiltonian_vacuum(double lambda, int n_atoms,
                                                      const std::vector<int>& active_atoms) {
  if (n_atoms < 2) throw std::invalid_argument("effective_hamiltonian_vacuum: n_atoms must be >= 2");
  if (active_atoms.size() < 2)
    throw std::invalid_argument("effective_hamiltonian_vacuum: hopping needs at least 2 atoms");
  detail::check_atoms(active_atoms, n_atoms);
  const BasisLayout layout = BasisLayout::atoms(n_atoms);
  Matrix h = Matrix::Zero(layout.total_dim(), layout.total_dim());
  for (int j : active_atoms) h += embed(project_e(), layout, j);
  for (int j : active_atoms)
    for (int k : active_atoms)
      if (j != k) h += embed(sigma_plus(), layout, j) * embed(sigma_minus(), layout, k);
  return HermitianOperator(layout, lambda * h);
}

inline HermitianOperator effective_hamiltonian_vacuum(double lambda, int n_atoms) {
  return effective_hamiltonian_vacuum(lambda, n_atoms, detail::all_atoms(n_atoms));
}

/// Total excitation count sum_j |e_j><e_j| + a^dag a; commutes with both
/// effective tiers and (in the untruncated limit) with the full Hamiltonian.
inline HermitianOperator excitation_operator(int n_atoms, int n_max) {
  const BasisLayout layout = BasisLayout::atoms_and_cavity(n_atoms, n_max);
  Matrix m = embed(fock_number(n_max + 1), layout, n_atoms);
  for (int j = 0; j < n_atoms; ++j) m += embed(project_e(), layout, j);
  return HermitianOperator(layout, std::move(m), OperatorUnits::dimensionless);
}

/// Excited-atom count on an atoms-only layout.
inline HermitianOperator excited_count_operator(int n_atoms) {
  const BasisLayout layout = BasisLayout::atoms(n_atoms);
  Matrix m = Matrix::Zero(layout.total_dim(), layout.total_dim());
  for (int j = 0; j < n_atoms; ++j) m += embed(project_e(), layout, j);
  return HermitianOperator(layout, std::move(m), OperatorUnits::dimensionless);
}

}  // namespace uqcm
