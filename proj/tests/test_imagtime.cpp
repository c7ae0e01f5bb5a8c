#include <cmath>
#include <vector>

#include "doctest.h"
#include "waveop/hilbert.hpp"
#include "waveop/imagtime.hpp"
#include "waveop/model.hpp"
#include "waveop/phasespace.hpp"

using namespace waveop;
using model::GridSpec;
using model::HamiltonianSpec;
using phasespace::PhaseSpaceField;

namespace {

GridSpec grid64() {
  GridSpec g;
  g.nx = 64;
  g.np = 64;
  return g;
}

double coth(double u) { return 1.0 / std::tanh(u); }

// harmonic thermal values: E = dx^2 = dp^2 = (1/2) coth(beta/2)
double harmonic_energy(double beta) { return 0.5 * coth(0.5 * beta); }

}  // namespace

TEST_SUITE("imagtime") {

TEST_CASE("uniform start has unit norm") {
  const PhaseSpaceField f = imagtime::uniform_initial_field(grid64(), 1.0);
  CHECK(std::abs(f.norm2() - 1.0) < 1e-12);
  CHECK(f.hbar == 1.0);
}

TEST_CASE("harmonic quantum descent matches the closed form") {
  const GridSpec g = grid64();
  const HamiltonianSpec h2 = HamiltonianSpec::benchmark(2);
  const PhaseSpaceField f0 = imagtime::uniform_initial_field(g, 1.0);

  const imagtime::BlochResult r =
      imagtime::bloch_quantum(f0, h2, 1e-3, 10000, 500);
  REQUIRE(r.series.axis.size() == 20);
  CHECK(r.series.tier == "quantum");

  const std::vector<std::size_t> rows = {0, 1, 3, 9, 19};
  for (const std::size_t k : rows) {
    const double beta = r.series.axis[k];
    const double want = harmonic_energy(beta);
    CHECK(std::abs(r.series.energy[k] - want) < 1e-3 * want);
    CHECK(std::abs(r.series.dx[k] * r.series.dp[k] - want) < 1e-3 * want);
  }

  for (std::size_t k = 0; k < r.series.axis.size(); ++k) {
    if (k > 0) {
      CHECK(r.series.axis[k] > r.series.axis[k - 1]);
      CHECK(r.series.energy[k] <= r.series.energy[k - 1] + 1e-12);
    }
    CHECK(r.series.dxdp[k] ==
          doctest::Approx(r.series.dx[k] * r.series.dp[k]).epsilon(1e-12));
    CHECK(r.series.dxdp[k] > 0.5 - 1e-3);
  }
  CHECK(r.series.axis[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.series.axis[19] == doctest::Approx(10.0).epsilon(1e-12));

  // At beta = 10 the field is the ground projector symbol up to the thermal
  // residual: the normalized e^{-beta H/2} keeps an excited amplitude
  // e^{-beta}/2 ~ 2.3e-5.
  const PhaseSpaceField ground = phasespace::coherent_field(g, 1.0, 0.0, 0.0);
  double overlap = 0.0;
  const double cell = g.dx() * g.dp();
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.np; ++j)
      overlap +=
          (std::conj(r.field.values(i, j)) * ground.values(i, j)).real() *
          cell;
  CHECK(overlap > 1.0 - 5e-5);
  CHECK(overlap <= 1.0 + 1e-12);
}

TEST_CASE("grid descent agrees with the matrix descent") {
  const HamiltonianSpec h2 = HamiltonianSpec::benchmark(2);
  const GridSpec g = grid64();
  const imagtime::BlochResult r =
      imagtime::bloch_quantum(imagtime::uniform_initial_field(g, 1.0), h2,
                              1e-3, 10000, 1000);

  const int N = 64;
  const auto [X, P] = hilbert::build_position_momentum(N, 1.0);
  const Eigen::MatrixXcd Hm = 0.5 * (X * X + P * P);
  for (const std::size_t k : {std::size_t{0}, std::size_t{4}, std::size_t{9}}) {
    const double beta = r.series.axis[k];
    const Eigen::MatrixXcd omega = hilbert::bloch_wave_operator(
        Hm, 1e-2, std::lround(beta / 1e-2));
    const double e_matrix = hilbert::expectation_wave(omega, Hm);
    CHECK(std::abs(r.series.energy[k] - e_matrix) < 1e-4);
  }
}

TEST_CASE("semiclassical tier is exact for the harmonic well") {
  // V'' and T'' constant: the hbar^2 generator equals the full Bopp expansion
  const GridSpec g = grid64();
  const HamiltonianSpec h2 = HamiltonianSpec::benchmark(2);
  const PhaseSpaceField f0 = imagtime::uniform_initial_field(g, 1.0);

  const imagtime::BlochResult q =
      imagtime::bloch_quantum(f0, h2, 1e-3, 5000, 500);
  const imagtime::BlochResult s =
      imagtime::bloch_semiclassical(f0, h2, 1e-3, 5000, 500);
  CHECK(s.series.tier == "semiclassical");
  REQUIRE(q.series.axis.size() == s.series.axis.size());
  for (std::size_t k = 0; k < q.series.axis.size(); ++k)
    CHECK(std::abs(q.series.energy[k] - s.series.energy[k]) < 1e-6);
  CHECK((q.field.values - s.field.values).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("classical descent matches the Gibbs closed form") {
  const GridSpec g = grid64();
  const HamiltonianSpec h2 = HamiltonianSpec::benchmark(2);
  const PhaseSpaceField f0 = imagtime::uniform_initial_field(g, 1.0);

  const imagtime::BlochResult r =
      imagtime::bloch_classical(f0, h2, 1e-3, 10000, 1000);
  CHECK(r.series.tier == "classical");
  for (std::size_t k = 0; k < r.series.axis.size(); ++k) {
    const double beta = r.series.axis[k];
    CHECK(std::abs(r.series.energy[k] - 1.0 / beta) < 1e-3 / beta);
    CHECK(std::abs(r.series.dxdp[k] - 1.0 / beta) < 1e-3 / beta);
  }

  // the normalized field is exactly the pointwise kernel at any beta
  const double beta = 1.0;
  const imagtime::BlochResult r1 =
      imagtime::bloch_classical(f0, h2, 1e-3, 1000, 1000);
  PhaseSpaceField want = phasespace::make_field(g, 1.0);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.np; ++j)
      want.values(i, j) =
          std::exp(-0.5 * beta * model::eval_hamiltonian(h2, g.x(i), g.p(j)));
  want.normalize();
  CHECK((r1.field.values - want.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("semiclassical tier degenerates to classical at hbar zero") {
  const GridSpec g = grid64();
  const HamiltonianSpec h4 = HamiltonianSpec::benchmark(4);
  const PhaseSpaceField f0 = imagtime::uniform_initial_field(g, 0.0);

  const imagtime::BlochResult s =
      imagtime::bloch_semiclassical(f0, h4, 1e-3, 2000, 500);
  const imagtime::BlochResult c =
      imagtime::bloch_classical(f0, h4, 1e-3, 2000, 500);
  CHECK((s.field.values - c.field.values).cwiseAbs().maxCoeff() < 1e-10);
  for (std::size_t k = 0; k < s.series.axis.size(); ++k) {
    CHECK(std::abs(s.series.energy[k] - c.series.energy[k]) < 1e-10);
    CHECK(std::abs(s.series.dxdp[k] - c.series.dxdp[k]) < 1e-10);
  }
}

TEST_CASE("quartic descent reaches the converged references") {
  const GridSpec g = grid64();
  const HamiltonianSpec h4 = HamiltonianSpec::benchmark(4);
  const PhaseSpaceField f0 = imagtime::uniform_initial_field(g, 1.0);

  const imagtime::BlochResult q =
      imagtime::bloch_quantum(f0, h4, 1e-3, 10000, 10000);
  CHECK(std::abs(q.series.energy[0] - 0.530182587911) < 1e-3);

  const imagtime::BlochResult s =
      imagtime::bloch_semiclassical(f0, h4, 1e-3, 10000, 10000);
  CHECK(std::abs(s.series.energy[0] - 0.5869460291) < 1e-4);

  // the tiers stay separated: the hbar^2 truncation is not the full theory
  CHECK(std::abs(q.series.energy[0] - s.series.energy[0]) > 1e-3);
}

TEST_CASE("three-tier sweep") {
  model::RunConfig cfg;
  cfg.hamiltonian = HamiltonianSpec::benchmark(2);
  cfg.grid = grid64();
  cfg.mode = model::RunMode::imag_sweep;
  cfg.step = 1e-3;
  cfg.n_steps = 2000;
  cfg.checkpoint_every = 500;

  const imagtime::SweepResult sweep = imagtime::thermal_sweep(cfg, 1);
  REQUIRE(sweep.quantum.series.axis.size() == 4);
  CHECK(sweep.quantum.series.tier == "quantum");
  CHECK(sweep.semiclassical.series.tier == "semiclassical");
  CHECK(sweep.classical.series.tier == "classical");
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(sweep.quantum.series.axis[k] ==
          doctest::Approx(sweep.classical.series.axis[k]).epsilon(1e-15));
    // classical energy sits below the quantum value once beta is past the
    // crossover kT ~ hbar omega
    CHECK(sweep.classical.series.energy[k] <
          sweep.quantum.series.energy[k]);
  }
  const double beta = sweep.quantum.series.axis[3];
  CHECK(beta == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(sweep.quantum.series.energy[3] - harmonic_energy(2.0)) <
        1e-3);
  CHECK(std::abs(sweep.classical.series.energy[3] - 0.5) < 1e-3);

  // concurrency must not change a single bit
  const imagtime::SweepResult par = imagtime::thermal_sweep(cfg, 3);
  CHECK(par.quantum.series.energy == sweep.quantum.series.energy);
  CHECK(par.semiclassical.series.energy == sweep.semiclassical.series.energy);
  CHECK(par.classical.series.energy == sweep.classical.series.energy);
  CHECK(par.quantum.field.values == sweep.quantum.field.values);
  CHECK(par.classical.field.values == sweep.classical.field.values);
}

TEST_CASE("default checkpointing records only the endpoint") {
  const GridSpec g = grid64();
  const HamiltonianSpec h2 = HamiltonianSpec::benchmark(2);
  const PhaseSpaceField f0 = imagtime::uniform_initial_field(g, 1.0);

  const imagtime::BlochResult r = imagtime::bloch_quantum(f0, h2, 1e-3, 100);
  REQUIRE(r.series.axis.size() == 1);
  CHECK(r.series.axis[0] == doctest::Approx(0.1).epsilon(1e-12));

  // a trailing partial block is still recorded
  const imagtime::BlochResult r2 =
      imagtime::bloch_quantum(f0, h2, 1e-3, 250, 100);
  REQUIRE(r2.series.axis.size() == 3);
  CHECK(r2.series.axis[2] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("descent argument validation") {
  const GridSpec g = grid64();
  const HamiltonianSpec h2 = HamiltonianSpec::benchmark(2);
  const PhaseSpaceField f0 = imagtime::uniform_initial_field(g, 1.0);

  CHECK_THROWS_AS(imagtime::bloch_quantum(f0, h2, -1e-3, 10, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(imagtime::bloch_quantum(f0, h2, 1e-3, 0, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(imagtime::bloch_quantum(f0, h2, 1e-3, 10, 20),
                  std::invalid_argument);

  const PhaseSpaceField f_hbarless = imagtime::uniform_initial_field(g, 0.0);
  CHECK_THROWS_AS(imagtime::bloch_quantum(f_hbarless, h2, 1e-3, 10, 10),
                  std::invalid_argument);
}

}  // TEST_SUITE
