#include <catch2/catch_amalgamated.hpp>
#include <numbers>

#include "test_support.hpp"
#include "uqcm/integrate.hpp"

using namespace uqcm;

namespace {
constexpr double pi = std::numbers::pi;

PureState with_vacuum(const PureState& atoms, int n_max) {
  return tensor(atoms, basis_state(BasisLayout(std::vector<int>{n_max + 1}), 0));
}
}  // namespace

TEST_CASE("evolve_time_dependent validates tolerance and layout") {
  PhysicalParams params;
  const PureState psi = with_vacuum(ket_g(), params.n_max);
  REQUIRE_THROWS_AS(evolve_time_dependent(psi, params, 1, 1.0, 1e-14), std::invalid_argument);
  REQUIRE_THROWS_AS(evolve_time_dependent(psi, params, 1, 1.0, 1e-2), std::invalid_argument);
  REQUIRE_THROWS_AS(evolve_time_dependent(ket_g(), params, 1, 1.0, 1e-8), std::invalid_argument);
}

TEST_CASE("zero coupling evolves nothing") {
  PhysicalParams params;
  params.g = 0.0;
  params.delta = 4.0;
  auto rng = test_support::make_rng(30);
  const PureState psi = with_vacuum(test_support::random_state(BasisLayout::atoms(2), rng), params.n_max);
  const auto res = evolve_time_dependent(psi, params, 2, 5.0, 1e-8);
  REQUIRE(test_support::max_amp_dev(res.state, psi) < 1e-12);
}

TEST_CASE("resonant vacuum Rabi oscillation matches the analytic two-level oracle") {
  PhysicalParams params;
  params.g = 1.0;
  params.delta = 0.0;
  const PureState in = with_vacuum(ket_e(), params.n_max);

  // The resonant pair {|e,0>, |g,1>} is a bare Rabi problem:
  //   |e,0> -> cos(g t)|e,0> - i sin(g t)|g,1>.
  std::vector<PureState> trajectory;
  const auto res = evolve_time_dependent(in, params, 1, pi / 2.0, 1e-9, {0},
                                         [&](double, const PureState& s) { trajectory.push_back(s); });
  Vector want = Vector::Zero(8);
  want(0b0'01) = cplx(0.0, -1.0);  // -i |g,1>
  REQUIRE(overlap_up_to_global_phase(res.state.normalized(), PureState(in.layout, want)) >= 1.0 - 1e-8);
  REQUIRE((res.state.amplitudes - want).cwiseAbs().maxCoeff() < 1e-6);  // phase convention included
  REQUIRE(res.norm_drift < 1e-8);

  // Half a Rabi period moves the excitation fully into the cavity.
  REQUIRE(res.max_photon_prob > 0.999);
  REQUIRE(max_photon_population(trajectory) > 0.999);
  REQUIRE(max_photon_population(trajectory, 1) > 0.999);

  // Mid-time analytic cross-check using the recorded trajectory is implicit in
  // max_photon_prob; the endpoint is the stringent comparison.
}

TEST_CASE("max_photon_population of an effective-tier trajectory is zero") {
  std::vector<PureState> traj = {basis_state(BasisLayout::atoms(2), 2)};
  REQUIRE(max_photon_population(traj, -1) == 0.0);
  REQUIRE(max_photon_population(std::vector<PureState>{}) == 0.0);
}

TEST_CASE("dispersive two-atom run reaches the effective-model checkpoint") {
  PhysicalParams params;
  params.delta = 20.0;
  const PureState in = with_vacuum(tensor(ket_e(), ket_g()), params.n_max);
  const auto res = evolve_time_dependent(in, params, 2, (pi / 4.0) / params.lambda(), 1e-8);

  Vector want = Vector::Zero(16);
  want(0b10'00) = 1.0 / std::sqrt(2.0);
  want(0b01'00) = cplx(0.0, -1.0) / std::sqrt(2.0);
  const double overlap = overlap_up_to_global_phase(res.state, PureState(in.layout, want));
  // Measured 0.99507 at delta = 20 g; the dominant loss is the O(g/delta)
  // virtual-photon amplitude still in flight at the stage end.
  REQUIRE(overlap >= 0.995);
  REQUIRE(res.max_photon_prob <= 10.0 / (params.delta * params.delta));
  REQUIRE(res.max_truncation_prob <= 1e-8);
}

TEST_CASE("step-size underflow reports a diagnostic error") {
  Vector y(2);
  y << 1.0, 0.5;
  auto blow_up = [](double, const Vector& v) -> Vector { return 1e30 * v; };
  REQUIRE_THROWS_AS(uqcm::detail::integrate_dopri5(y, 1.0, 1e-8, 0.1, blow_up, [](double, const Vector&) {}),
                    IntegrationError);
}

TEST_CASE("kappa=0 master equation reproduces the unitary evolution") {
  PhysicalParams params;
  params.delta = 20.0;
  const double rel_tol = 1e-8;
  auto rng = test_support::make_rng(31);
  const PureState atoms = test_support::random_state(BasisLayout::atoms(2), rng);
  const PureState psi0 = with_vacuum(atoms, params.n_max);
  const double t = (pi / 4.0) / params.lambda();

  const auto unitary = evolve_time_dependent(psi0, params, 2, t, rel_tol);
  const auto master = evolve_lindblad(pure_to_density(psi0), params, 2, t, rel_tol);
  const double f = fidelity_pure(master.rho, unitary.state.normalized());
  REQUIRE(f >= 1.0 - 10.0 * rel_tol);
  REQUIRE(master.trace_drift <= 1e-9);
  REQUIRE(master.hermiticity_drift <= 1e-9);
}

TEST_CASE("bare cavity decay is exponential") {
  PhysicalParams params;
  params.g = 0.0;
  params.delta = 1.0;
  params.kappa = 0.25;
  const DensityMatrix rho0 = pure_to_density(tensor(ket_g(), basis_state(BasisLayout(std::vector<int>{4}), 1)));
  const double t = 3.0;
  const auto res = evolve_lindblad(rho0, params, 1, t, 1e-9);
  double p1 = 0.0;
  for (int idx = 0; idx < 8; ++idx)
    if (rho0.layout.digit(idx, 1) == 1) p1 += res.rho.matrix(idx, idx).real();
  REQUIRE(std::abs(p1 - std::exp(-params.kappa * t)) < 1e-9);
  REQUIRE(res.trace_drift <= 1e-9);
}

TEST_CASE("thermal pumping keeps the state physical") {
  PhysicalParams params;
  params.g = 0.0;
  params.delta = 1.0;
  params.kappa = 0.5;
  params.n_th = 0.2;
  const DensityMatrix rho0 = pure_to_density(tensor(ket_g(), basis_state(BasisLayout(std::vector<int>{4}), 0)));
  const auto res = evolve_lindblad(rho0, params, 1, 4.0, 1e-9);
  REQUIRE(res.trace_drift <= 1e-9);
  REQUIRE(res.rho.hermiticity_residual() <= 1e-9);
  REQUIRE(res.rho.min_eigenvalue() >= -1e-10);
  // Some thermal photon population must have appeared.
  double p_excited = 0.0;
  for (int idx = 0; idx < 8; ++idx)
    if (rho0.layout.digit(idx, 1) >= 1) p_excited += res.rho.matrix(idx, idx).real();
  REQUIRE(p_excited > 0.05);
}

TEST_CASE("evolve_lindblad validates inputs") {
  PhysicalParams params;
  const DensityMatrix rho = pure_to_density(with_vacuum(ket_g(), params.n_max));
  REQUIRE_THROWS_AS(evolve_lindblad(rho, params, 1, 1.0, 1e-14), std::invalid_argument);
  REQUIRE_THROWS_AS(evolve_lindblad(pure_to_density(ket_g()), params, 1, 1.0, 1e-8), std::invalid_argument);
}
