#pragma once

#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "uqcm/hamiltonian.hpp"
#include "uqcm/state.hpp"

namespace uqcm {

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using SparseMatrix = Eigen::SparseMatrix<cplx>;

namespace detail {

// Dormand-Prince 5(4) tableau (FSAL).
struct Dopri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // 5th-order minus embedded 4th-order weights (error estimator).
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

inline double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
inline double inf_norm(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Adaptive DOPRI5 from t=0 to t_final. Calls observe(t, y) at every accepted
// step (including the initial point). Error control is on the max-norm with
// mixed tolerance atol + rel_tol * |y|_inf; steps never exceed dt_max.
template <typename StateT, typename Deriv, typename Observer>
int integrate_dopri5(StateT& y, double t_final, double rel_tol, double dt_max, Deriv deriv, Observer observe) {
  using T = Dopri5;
  if (t_final < 0.0) throw std::invalid_argument("integrate_dopri5: t_final must be >= 0");
  const double atol = 1e-14;
  int accepted = 0;
  double t = 0.0;
  observe(t, y);
  if (t_final == 0.0) return 0;

  double dt = std::min(dt_max, t_final);
  StateT k1 = deriv(t, y);
  StateT k2 = k1, k3 = k1, k4 = k1, k5 = k1, k6 = k1, k7 = k1;
  StateT y_new = y;

  while (t < t_final) {
    const double remaining = t_final - t;
    if (remaining <= t_final * 1e-14) break;  // converged to the endpoint within roundoff
    const double h = std::min(dt, remaining);
    if (h <= t_final * 1e-15 || t + h == t) {
      throw IntegrationError("integrate_dopri5: step size underflow at t=" + std::to_string(t) +
                             " (dt=" + std::to_string(h) + "); dynamics too stiff for the requested tolerance");
    }

    k2 = deriv(t + T::c2 * h, y + h * (T::a21 * k1));
    k3 = deriv(t + T::c3 * h, y + h * (T::a31 * k1 + T::a32 * k2));
    k4 = deriv(t + T::c4 * h, y + h * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3));
    k5 = deriv(t + T::c5 * h, y + h * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 + T::a54 * k4));
    k6 = deriv(t + h, y + h * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 + T::a64 * k4 + T::a65 * k5));
    y_new = y + h * (T::b1 * k1 + T::b3 * k3 + T::b4 * k4 + T::b5 * k5 + T::b6 * k6);
    k7 = deriv(t + h, y_new);

    const StateT err = h * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 + T::e6 * k6 + T::e7 * k7);
    const double scale = atol + rel_tol * std::max(inf_norm(y), inf_norm(y_new));
    const double err_ratio = inf_norm(err) / scale;

    if (err_ratio <= 1.0) {
      t += h;
      y.swap(y_new);
      k1.swap(k7);  // FSAL
      ++accepted;
      observe(t, y);
    }
    const double factor = err_ratio > 0.0 ? 0.9 * std::pow(err_ratio, -0.2) : 5.0;
    dt = std::min(h * std::clamp(factor, 0.2, 5.0), dt_max);
  }
  return accepted;
}

}  // namespace detail

struct EvolutionResult {
  PureState state;           // final state, not renormalized
  double norm_drift = 0.0;   // | ||psi|| - 1 | accumulated by the integrator
  double max_photon_prob = 0.0;      // max over accepted steps of P(n >= 1)
  double max_truncation_prob = 0.0;  // max over accepted steps of P(n = n_max)
  int steps = 0;
};

/// P(n >= 1) and P(n = n_max) of the cavity factor (assumed last).
inline std::pair<double, double> photon_probabilities(const BasisLayout& layout, const Vector& amp) {
  const int cavity = layout.n_factors() - 1;
  const int fock_dim = layout.dim(cavity);
  double excited = 0.0, top = 0.0;
  for (int idx = 0; idx < amp.size(); ++idx) {
    const int n = layout.digit(idx, cavity);
    if (n >= 1) excited += std::norm(amp(idx));
    if (n == fock_dim - 1) top += std::norm(amp(idx));
  }
  return {excited, top};
}

using TrajectoryObserver = std::function<void(double, const PureState&)>;

/// Integrates i d psi/dt = H(t) psi with the interaction-picture Hamiltonian
/// of the listed atoms. The step ceiling 2pi/(50 delta) resolves the e^{i delta t}
/// oscillation, the stiffest scale present. Norm drift is reported, never
/// silently corrected.
inline EvolutionResult evolve_time_dependent(const PureState& state, const PhysicalParams& params, int n_atoms,
                                             double t_final, double rel_tol,
                                             const std::vector<int>& active_atoms,
                                             const TrajectoryObserver& observer = nullptr) {
  params.validate();
  if (rel_tol <= 1e-13 || rel_tol >= 1e-3)
    throw std::invalid_argument("evolve_time_dependent: rel_tol must lie in (1e-13, 1e-3)");
  const BasisLayout expected = BasisLayout::atoms_and_cavity(n_atoms, params.n_max);
  if (state.layout != expected)
    throw std::invalid_argument("evolve_time_dependent: state layout " + state.layout.to_string() +
                                " does not match atoms+cavity layout " + expected.to_string());

  const SparseMatrix m_plus = coupling_matrix(params, n_atoms, active_atoms).sparseView();
  const SparseMatrix m_minus = SparseMatrix(m_plus.adjoint());
  const double delta = params.delta;
  const cplx minus_i(0.0, -1.0);

  auto deriv = [&](double t, const Vector& psi) -> Vector {
    const cplx ph = std::polar(1.0, -delta * t);
    return minus_i * (ph * (m_plus * psi) + std::conj(ph) * (m_minus * psi));
  };

  EvolutionResult result{state, 0.0, 0.0, 0.0, 0};
  const double fastest = std::max(delta, params.g * std::sqrt(params.n_max + 1.0));
  const double dt_max = fastest > 0.0 ? 2.0 * std::numbers::pi / (50.0 * fastest) : t_final;

  Vector psi = state.amplitudes;
  result.steps = detail::integrate_dopri5(psi, t_final, rel_tol, dt_max, deriv, [&](double t, const Vector& y) {
    const auto [excited, top] = photon_probabilities(state.layout, y);
    result.max_photon_prob = std::max(result.max_photon_prob, excited);
    result.max_truncation_prob = std::max(result.max_truncation_prob, top);
    if (observer) observer(t, PureState(state.layout, y));
  });

  result.state = PureState(state.layout, std::move(psi));
  result.norm_drift = std::abs(result.state.norm() - 1.0);
  return result;
}

inline EvolutionResult evolve_time_dependent(const PureState& state, const PhysicalParams& params, int n_atoms,
                                             double t_final, double rel_tol) {
  return evolve_time_dependent(state, params, n_atoms, t_final, rel_tol, detail::all_atoms(n_atoms));
}

/// Max over a sampled trajectory of the probability of at least one photon.
/// cavity_factor = -1 means no cavity mode was modeled (effective tier): 0.
inline double max_photon_population(const std::vector<PureState>& trajectory, int cavity_factor) {
  if (cavity_factor == -1) return 0.0;
  double peak = 0.0;
  for (const auto& psi : trajectory) {
    psi.layout.check_factor(cavity_factor);
    double excited = 0.0;
    for (int idx = 0; idx < psi.amplitudes.size(); ++idx)
      if (psi.layout.digit(idx, cavity_factor) >= 1) excited += std::norm(psi.amplitudes(idx));
    peak = std::max(peak, excited);
  }
  return peak;
}

inline double max_photon_population(const std::vector<PureState>& trajectory) {
  if (trajectory.empty()) return 0.0;
  return max_photon_population(trajectory, trajectory.front().layout.n_factors() - 1);
}

struct LindbladResult {
  DensityMatrix rho;          // final state, trace drift not corrected
  double trace_drift = 0.0;
  double hermiticity_drift = 0.0;
  double max_truncation_prob = 0.0;
  int steps = 0;
};

/// Master equation for the same interaction-picture Hamiltonian plus the
/// standard single-mode cavity damping generator:
///   d rho/dt = -i[H(t), rho] + kappa (n_th+1) D[a] rho + kappa n_th D[a^dag] rho
/// with D[L] rho = L rho L^dag - (1/2){L^dag L, rho}. kappa = 0 reproduces the
/// unitary evolution of the same Hamiltonian.
inline LindbladResult evolve_lindblad(const DensityMatrix& rho0, const PhysicalParams& params, int n_atoms,
                                      double t_final, double rel_tol, const std::vector<int>& active_atoms) {
  params.validate();
  if (rel_tol <= 1e-13 || rel_tol >= 1e-3)
    throw std::invalid_argument("evolve_lindblad: rel_tol must lie in (1e-13, 1e-3)");
  const BasisLayout expected = BasisLayout::atoms_and_cavity(n_atoms, params.n_max);
  if (rho0.layout != expected)
    throw std::invalid_argument("evolve_lindblad: rho layout " + rho0.layout.to_string() +
                                " does not match atoms+cavity layout " + expected.to_string());

  const SparseMatrix m_plus = coupling_matrix(params, n_atoms, active_atoms).sparseView();
  const int cavity = n_atoms;
  const SparseMatrix a_op = embed(fock_annihilate(params.n_max + 1), rho0.layout, cavity).sparseView();
  const SparseMatrix a_dag = SparseMatrix(a_op.adjoint());
  // Truncated products keep the dissipator exactly trace-preserving.
  const Matrix n_down = (Matrix(a_dag) * Matrix(a_op)).eval();  // a^dag a (diagonal)
  const Matrix n_up = (Matrix(a_op) * Matrix(a_dag)).eval();    // a a^dag truncated
  const Eigen::VectorXd diag_down = n_down.diagonal().real();
  const Eigen::VectorXd diag_up = n_up.diagonal().real();

  const double rate_down = params.kappa * (params.n_th + 1.0);
  const double rate_up = params.kappa * params.n_th;
  const double delta = params.delta;
  const cplx minus_i(0.0, -1.0);

  auto deriv = [&](double t, const Matrix& rho) -> Matrix {
    const cplx ph = std::polar(1.0, -delta * t);
    // [H, rho] = ph [M+, rho] + conj(ph) [M-, rho]; for Hermitian rho the
    // second commutator is minus the adjoint of the first.
    Matrix c = m_plus * rho;
    c.noalias() -= rho * m_plus;
    Matrix d = minus_i * (ph * c - (std::conj(ph) * c.adjoint()).eval());
    if (rate_down > 0.0) {
      d.noalias() += rate_down * (a_op * (rho * a_dag));
      d -= (0.5 * rate_down) * (diag_down.asDiagonal() * rho + rho * diag_down.asDiagonal());
    }
    if (rate_up > 0.0) {
      d.noalias() += rate_up * (a_dag * (rho * a_op));
      d -= (0.5 * rate_up) * (diag_up.asDiagonal() * rho + rho * diag_up.asDiagonal());
    }
    return d;
  };

  LindbladResult result{rho0, 0.0, 0.0, 0.0, 0};
  const double fastest = std::max(delta, params.g * std::sqrt(params.n_max + 1.0));
  const double dt_max = fastest > 0.0 ? 2.0 * std::numbers::pi / (50.0 * fastest) : t_final;
  const int fock_dim = params.n_max + 1;

  Matrix rho = rho0.matrix;
  result.steps = detail::integrate_dopri5(rho, t_final, rel_tol, dt_max, deriv, [&](double, const Matrix& y) {
    double top = 0.0;
    for (int idx = 0; idx < y.rows(); ++idx)
      if (rho0.layout.digit(idx, cavity) == fock_dim - 1) top += y(idx, idx).real();
    result.max_truncation_prob = std::max(result.max_truncation_prob, top);
  });

  result.rho = DensityMatrix(rho0.layout, std::move(rho));
  result.trace_drift = std::abs(result.rho.trace_real() - 1.0);
  result.hermiticity_drift = result.rho.hermiticity_residual();
  return result;
}

inline LindbladResult evolve_lindblad(const DensityMatrix& rho0, const PhysicalParams& params, int n_atoms,
                                      double t_final, double rel_tol) {
  return evolve_lindblad(rho0, params, n_atoms, t_final, rel_tol, detail::all_atoms(n_atoms));
}

}  // namespace uqcm
