#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "waveop/hilbert.hpp"
#include "waveop/model.hpp"
#include "waveop/oracle.hpp"

using namespace waveop;
using namespace std::complex_literals;
using model::GridSpec;
using model::HamiltonianSpec;

namespace {

constexpr double kPiOracle = 3.14159265358979323846;

double coth(double u) { return 1.0 / std::tanh(u); }

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("harmonic spectrum on the truncated ladder") {
  const HamiltonianSpec h2 = HamiltonianSpec::benchmark(2);
  const oracle::SpectralDecomposition d = oracle::decompose(h2, 64);
  REQUIRE(d.eigenvalues.size() == 64);
  // interior levels are exact n + 1/2; the truncation corrupts only the top
  for (int n = 0; n < 32; ++n)
    CHECK(d.eigenvalues(n) == doctest::Approx(n + 0.5).epsilon(1e-10));
  CHECK(d.convergence_estimate < 1e-12);

  // orthonormality and the eigen residual
  const Eigen::MatrixXcd V = d.eigenvectors;
  CHECK(testutil::max_abs(V.adjoint() * V -
                          Eigen::MatrixXcd::Identity(64, 64)) < 1e-12);
  const auto [X, P] = hilbert::build_position_momentum(64, 1.0);
  const Eigen::MatrixXcd Hm = 0.5 * (X * X + P * P);
  CHECK(testutil::max_abs(Hm * V.col(0) - d.eigenvalues(0) * V.col(0)) <
        1e-10);

  CHECK_THROWS_AS(oracle::decompose(h2, 3), std::invalid_argument);
}

TEST_CASE("quartic ground energy") {
  const HamiltonianSpec h4 = HamiltonianSpec::benchmark(4);
  const oracle::SpectralDecomposition d = oracle::decompose(h4, 128);
  CHECK(d.eigenvalues(0) == doctest::Approx(0.530181045242).epsilon(1e-9));
  CHECK(d.convergence_estimate < 1e-8);
}

TEST_CASE("thermal observables of the harmonic well") {
  const HamiltonianSpec h2 = HamiltonianSpec::benchmark(2);
  for (const double beta : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    const oracle::ThermalObservables o =
        oracle::exact_diag_thermal(h2, 96, beta);
    const double want = 0.5 * coth(0.5 * beta);
    CHECK(o.energy == doctest::Approx(want).epsilon(1e-9));
    CHECK(o.dx == doctest::Approx(std::sqrt(want)).epsilon(1e-9));
    CHECK(o.dp == doctest::Approx(std::sqrt(want)).epsilon(1e-9));
  }
}

TEST_CASE("unconverged basis is refused with a retry hint") {
  const HamiltonianSpec h4 = HamiltonianSpec::benchmark(4);
  try {
    oracle::exact_diag_thermal(h4, 8, 1.0);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("16") != std::string::npos);
  }
}

TEST_CASE("direct Liouville integration") {
  const int N = 8;
  std::mt19937_64 rng(7);
  const Eigen::MatrixXcd H = testutil::random_hermitian(rng, N);

  SUBCASE("stationary state") {
    // rho commuting with H stays put
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    Eigen::VectorXd w(N);
    for (int n = 0; n < N; ++n) w(n) = std::exp(-double(n));
    w /= w.sum();
    const Eigen::MatrixXcd rho0 = es.eigenvectors() * w.asDiagonal() *
                                  es.eigenvectors().adjoint();
    const oracle::DensityTrajectory traj =
        oracle::liouville_direct(rho0, H, 1.0, 1e-3, 1.0, 1000);
    REQUIRE(traj.states.size() == 1);
    CHECK(testutil::max_abs(traj.states[0] - rho0) < 1e-10);
  }

  SUBCASE("trace and Hermiticity are preserved") {
    Eigen::MatrixXcd a = testutil::random_complex(rng, N);
    Eigen::MatrixXcd rho0 = a * a.adjoint();
    rho0 /= rho0.trace().real();
    const oracle::DensityTrajectory traj =
        oracle::liouville_direct(rho0, H, 1.0, 1e-3, 1.0, 250);
    REQUIRE(traj.states.size() == 4);
    CHECK(traj.times[3] == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& rho : traj.states) {
      CHECK(std::abs(rho.trace().real() - 1.0) < 1e-10);
      CHECK(testutil::max_abs(rho - rho.adjoint()) < 1e-10);
    }
  }

  SUBCASE("two-level Rabi oscillation") {
    Eigen::MatrixXcd sx(2, 2), rho0(2, 2);
    sx << 0.0, 1.0, 1.0, 0.0;
    rho0 << 1.0, 0.0, 0.0, 0.0;
    const double dt = kPiOracle / 3000.0;
    const oracle::DensityTrajectory traj =
        oracle::liouville_direct(rho0, 0.5 * sx, kPiOracle, dt, 1.0, 3000);
    // under H = sx/2 the population inverts after t = pi
    CHECK(std::abs(traj.states[0](1, 1).real() - 1.0) < 1e-9);
    CHECK(std::abs(traj.states[0](0, 0).real()) < 1e-9);
  }

  SUBCASE("preconditions") {
    Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(N, N);
    rho0(0, 0) = 1.0;
    Eigen::MatrixXcd bad_h = H;
    bad_h(0, 1) += 0.5;  // breaks Hermiticity
    CHECK_THROWS_AS(oracle::liouville_direct(rho0, bad_h, 1.0, 1e-3),
                    std::invalid_argument);

    Eigen::MatrixXcd rho_trace = rho0 * 2.0;
    CHECK_THROWS_AS(oracle::liouville_direct(rho_trace, H, 1.0, 1e-3),
                    std::invalid_argument);

    Eigen::MatrixXcd rho_neg = Eigen::MatrixXcd::Zero(N, N);
    rho_neg(0, 0) = 1.5;
    rho_neg(1, 1) = -0.5;
    CHECK_THROWS_AS(oracle::liouville_direct(rho_neg, H, 1.0, 1e-3),
                    std::invalid_argument);

    CHECK_THROWS_AS(oracle::liouville_direct(rho0, H, 1.05, 0.1),
                    std::invalid_argument);
  }

  SUBCASE("step instability diagnostic") {
    Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(N, N);
    rho0(0, 0) = 1.0;
    // dt far beyond the RK4 stability radius for this spectrum
    CHECK_THROWS_AS(oracle::liouville_direct(rho0, 100.0 * H, 50.0, 25.0),
                    NumericalError);
  }
}

TEST_CASE("classical Gibbs quadrature") {
  const HamiltonianSpec h2 = HamiltonianSpec::benchmark(2);
  for (const double beta : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    const oracle::ThermalObservables o =
        oracle::classical_gibbs_quadrature(h2, beta);
    CHECK(o.energy == doctest::Approx(1.0 / beta).epsilon(1e-9));
    CHECK(o.dx == doctest::Approx(1.0 / std::sqrt(beta)).epsilon(1e-9));
    CHECK(o.dp == doctest::Approx(1.0 / std::sqrt(beta)).epsilon(1e-9));
  }

  const HamiltonianSpec h4 = HamiltonianSpec::benchmark(4);
  const oracle::ThermalObservables o4 =
      oracle::classical_gibbs_quadrature(h4, 1.0);
  CHECK(o4.energy == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(o4.dx == doctest::Approx(0.691367339036).epsilon(1e-8));
  CHECK(o4.dp == doctest::Approx(1.0).epsilon(1e-9));

  // cross-check one point against a plain Riemann sum
  const double beta = 2.0;
  double z = 0.0, zx2 = 0.0;
  const int n = 4000;
  const double lim = 6.0, h = 2.0 * lim / n;
  for (int i = 0; i < n; ++i) {
    const double x = -lim + (i + 0.5) * h;
    const double w = std::exp(-0.5 * beta * x * x * x * x);
    z += w;
    zx2 += w * x * x;
  }
  const oracle::ThermalObservables ob =
      oracle::classical_gibbs_quadrature(h4, beta);
  CHECK(ob.dx == doctest::Approx(std::sqrt(zx2 / z)).epsilon(1e-6));

  HamiltonianSpec open_v;
  open_v.kinetic_coeffs = {0.0, 0.0, 0.5};
  open_v.potential_coeffs = {0.0, 0.0, -0.5};
  CHECK_THROWS_AS(oracle::classical_gibbs_quadrature(open_v, 1.0),
                  ConfigError);

  HamiltonianSpec odd_t;
  odd_t.kinetic_coeffs = {0.0, 0.0, 0.0, 1.0};
  odd_t.potential_coeffs = {0.0, 0.0, 0.5};
  CHECK_THROWS_AS(oracle::classical_gibbs_quadrature(odd_t, 1.0),
                  ConfigError);
}

TEST_CASE("dense semiclassical reference") {
  GridSpec g;
  g.x_min = -6.0;
  g.x_max = 6.0;
  g.p_min = -6.0;
  g.p_max = 6.0;
  g.nx = 32;
  g.np = 32;

  // for the harmonic well the hbar^2 generator is the full quantum one
  const HamiltonianSpec h2 = HamiltonianSpec::benchmark(2);
  const oracle::ThermalObservables oq =
      oracle::semiclassical_dense_reference(h2, g, 5.0);
  CHECK(oq.energy == doctest::Approx(0.506783654906).epsilon(1e-6));

  const HamiltonianSpec h4 = HamiltonianSpec::benchmark(4);
  const oracle::ThermalObservables o4 =
      oracle::semiclassical_dense_reference(h4, g, 10.0);
  CHECK(o4.energy == doctest::Approx(0.5870672898).epsilon(1e-8));

  // hbar -> 0 degenerates to the classical Gibbs moments
  HamiltonianSpec h4c = h4;
  h4c.hbar = 0.0;
  const oracle::ThermalObservables oc =
      oracle::semiclassical_dense_reference(h4c, g, 2.0);
  const oracle::ThermalObservables og =
      oracle::classical_gibbs_quadrature(h4, 2.0);
  CHECK(std::abs(oc.energy - og.energy) < 1e-3);
  CHECK(std::abs(oc.dx - og.dx) < 1e-3);

  GridSpec big = g;
  big.nx = 128;
  big.np = 128;
  CHECK_THROWS_AS(oracle::semiclassical_dense_reference(h4, big, 1.0),
                  ConfigError);
}

}  // TEST_SUITE
