#include <catch2/catch_amalgamated.hpp>
#include <numbers>

#include "test_support.hpp"
#include "uqcm/propagate.hpp"

using namespace uqcm;
using test_support::make_rng;
using test_support::max_amp_dev;
using test_support::random_state;

namespace {
constexpr double pi = std::numbers::pi;

PureState g_psi_plus() {
  Vector v = Vector::Zero(8);
  v(0b010) = 1.0 / std::sqrt(2.0);
  v(0b001) = 1.0 / std::sqrt(2.0);
  return PureState(BasisLayout::atoms(3), v);
}
}  // namespace

TEST_CASE("evolve_exact at t=0 is the identity") {
  auto rng = make_rng(20);
  const PureState psi = random_state(BasisLayout::atoms(2), rng);
  const PureState out = evolve_exact(psi, effective_hamiltonian_vacuum(1.0, 2), 0.0);
  REQUIRE(max_amp_dev(out, psi) < 1e-14);
  REQUIRE_THROWS_AS(evolve_exact(ket_g(), effective_hamiltonian_vacuum(1.0, 2), 1.0), std::invalid_argument);
}

TEST_CASE("pair collision at lambda t = pi/4 reaches the entangled checkpoint") {
  const PureState in = tensor(ket_e(), ket_g());
  const PureState got = evolve_exact(in, effective_hamiltonian_vacuum(1.0, 2), pi / 4.0);
  Vector want(4);
  want << 0.0, cplx(0.0, -1.0) / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0;
  REQUIRE(std::abs(overlap_up_to_global_phase(got, PureState(in.layout, want)) - 1.0) < 1e-13);
  // With the common phase retained the prefactor is e^{-i pi/4}.
  REQUIRE(std::abs(got.amplitudes(2) - std::polar(1.0 / std::sqrt(2.0), -pi / 4.0)) < 1e-13);
}

TEST_CASE("three-atom evolution at lambda t = 2pi/9 splits sqrt(1/3) / sqrt(2/3)") {
  const PureState got = evolve_exact(g_psi_plus(), effective_hamiltonian_vacuum(1.0, 3), 2.0 * pi / 9.0);
  const cplx on_psi = (got.amplitudes(0b010) + got.amplitudes(0b001)) / std::sqrt(2.0);
  REQUIRE(std::abs(std::abs(on_psi) - std::sqrt(1.0 / 3.0)) < 1e-13);
  REQUIRE(std::abs(std::abs(got.amplitudes(0b100)) - std::sqrt(2.0 / 3.0)) < 1e-13);
}

TEST_CASE("closed-form two-atom collision: checkpoint, identity, errors") {
  const PureState in = tensor(ket_e(), ket_g());
  const PureState got = collision_two_atom(in, 0, 1, pi / 4.0);
  const cplx pref = std::polar(1.0, -pi / 4.0);
  REQUIRE(std::abs(got.amplitudes(2) - pref / std::sqrt(2.0)) < 1e-15);
  REQUIRE(std::abs(got.amplitudes(1) - pref * cplx(0.0, -1.0) / std::sqrt(2.0)) < 1e-15);

  REQUIRE(max_amp_dev(collision_two_atom(in, 0, 1, 0.0), in) == 0.0);
  REQUIRE_THROWS_AS(collision_two_atom(in, 1, 1, 0.3), std::invalid_argument);
}

TEST_CASE("two-atom collision agrees with the matrix-exponential oracle") {
  auto rng = make_rng(21);
  std::uniform_real_distribution<double> u(0.0, 2.0 * pi);
  const BasisLayout lay = BasisLayout::atoms(3);
  const HermitianOperator h_pair = effective_hamiltonian_vacuum(1.0, 3, {1, 2});
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double phase = u(rng);
    const PureState in = random_state(lay, rng);
    worst = std::max(worst, max_amp_dev(collision_two_atom(in, 1, 2, phase), evolve_exact(in, h_pair, phase)));
  }
  REQUIRE(worst <= 1e-12);
}

TEST_CASE("two-atom collision leaves spectator factors alone") {
  auto rng = make_rng(22);
  const BasisLayout lay(std::vector<int>{2, 2, 2, 3});  // two atoms + extra qubit + qutrit
  const PureState in = random_state(lay, rng);
  const PureState out = collision_two_atom(in, 0, 1, 1.234);
  // Populations of the spectator factors are untouched.
  for (int f : {2, 3}) {
    for (int val = 0; val < lay.dim(f); ++val) {
      double before = 0.0, after = 0.0;
      for (int idx = 0; idx < lay.total_dim(); ++idx) {
        if (lay.digit(idx, f) != val) continue;
        before += std::norm(in.amplitudes(idx));
        after += std::norm(out.amplitudes(idx));
      }
      REQUIRE(std::abs(after - before) < 1e-13);
    }
  }
}

TEST_CASE("three-atom collision reproduces the closed-form coefficients") {
  const double phase = 2.0 * pi / 9.0;
  const PureState got = collision_three_atom(g_psi_plus(), 0, 1, 2, phase);

  // Transfer coefficient: magnitude (2 sqrt(2)/3) sin(3 phase/2) = sqrt(2/3).
  REQUIRE(std::abs(std::abs(got.amplitudes(0b100)) - std::sqrt(2.0 / 3.0)) < 1e-14);

  // Survival coefficient: e^{-i pi/3} (1/2 - i sqrt(3)/6), magnitude 1/sqrt(3).
  const cplx on_psi = (got.amplitudes(0b010) + got.amplitudes(0b001)) / std::sqrt(2.0);
  const cplx want = std::polar(1.0, -pi / 3.0) * cplx(0.5, -std::sqrt(3.0) / 6.0);
  REQUIRE(std::abs(on_psi - want) < 1e-14);
  REQUIRE(std::abs(std::abs(on_psi) - 1.0 / std::sqrt(3.0)) < 1e-14);
}

TEST_CASE("three-atom collision fixes the all-ground state") {
  auto rng = make_rng(23);
  std::uniform_real_distribution<double> u(0.0, 2.0 * pi);
  const PureState ggg = basis_state(BasisLayout::atoms(3), 0);
  for (int trial = 0; trial < 5; ++trial)
    REQUIRE(max_amp_dev(collision_three_atom(ggg, 0, 1, 2, u(rng)), ggg) == 0.0);
  REQUIRE_THROWS_AS(collision_three_atom(ggg, 0, 1, 1, 0.4), std::invalid_argument);
}

TEST_CASE("three-atom collision agrees with the matrix-exponential oracle") {
  auto rng = make_rng(24);
  std::uniform_real_distribution<double> u(0.0, 2.0 * pi);
  const BasisLayout lay = BasisLayout::atoms(3);
  const HermitianOperator h = effective_hamiltonian_vacuum(1.0, 3);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double phase = u(rng);
    const PureState in = random_state(lay, rng);
    worst = std::max(worst, max_amp_dev(collision_three_atom(in, 0, 1, 2, phase), evolve_exact(in, h, phase)));
  }
  REQUIRE(worst <= 1e-12);
}

TEST_CASE("collision propagators are unitary") {
  auto rng = make_rng(25);
  std::uniform_real_distribution<double> u(0.0, 2.0 * pi);
  const BasisLayout lay = BasisLayout::atoms(3);
  const Matrix id = Matrix::Identity(8, 8);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double phase = u(rng);
    Matrix u2(8, 8), u3(8, 8);
    for (int c = 0; c < 8; ++c) {
      u2.col(c) = collision_two_atom(basis_state(lay, c), 1, 2, phase).amplitudes;
      u3.col(c) = collision_three_atom(basis_state(lay, c), 0, 1, 2, phase).amplitudes;
    }
    worst = std::max({worst, (u2.adjoint() * u2 - id).cwiseAbs().maxCoeff(),
                      (u3.adjoint() * u3 - id).cwiseAbs().maxCoeff()});
  }
  REQUIRE(worst <= 1e-12);
}

TEST_CASE("excitation sectors are conserved under vacuum-tier evolution") {
  auto rng = make_rng(26);
  std::uniform_real_distribution<double> u(0.0, 2.0 * pi);
  const HermitianOperator h = effective_hamiltonian_vacuum(0.9, 3);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const PureState in = random_state(BasisLayout::atoms(3), rng);
    const PureState out = evolve_exact(in, h, u(rng));
    for (int sector = 0; sector <= 3; ++sector) {
      double before = 0.0, after = 0.0;
      for (int idx = 0; idx < 8; ++idx) {
        const int exc = ((idx >> 2) & 1) + ((idx >> 1) & 1) + (idx & 1);
        if (exc != sector) continue;
        before += std::norm(in.amplitudes(idx));
        after += std::norm(out.amplitudes(idx));
      }
      worst = std::max(worst, std::abs(after - before));
    }
  }
  REQUIRE(worst <= 1e-12);
}
