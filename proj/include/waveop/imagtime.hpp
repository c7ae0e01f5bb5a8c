#pragma once

#include <string>
#include <vector>

#include "waveop/model.hpp"
#include "waveop/phasespace.hpp"

namespace waveop::imagtime {

// Checkpoint rows of a Bloch descent: one entry per checkpoint, axis holding
// beta. norm_prerenorm is the field norm just before the renormalization of
// the checkpoint step; its drift toward a constant signals convergence to the
// ground state.
struct ObservableSeries {
  std::vector<double> axis;
  std::vector<double> energy;
  std::vector<double> dx;
  std::vector<double> dp;
  std::vector<double> dxdp;
  std::vector<double> norm_prerenorm;
  std::string tier;
};

struct BlochResult {
  phasespace::PhaseSpaceField field;  // unit L2 norm at the final beta
  ObservableSeries series;
};

// Infinite-temperature start: the constant field of unit L2 norm over the
// periodic cell (the symbol of the identity, normalized).
phasespace::PhaseSpaceField uniform_initial_field(const model::GridSpec& grid,
                                                  double hbar);

// d Omega / d beta = -(1/4)[H(x - h theta/2, p + h lambda/2)
//                           + H(x + h theta/2, p - h lambda/2)] Omega,
// Strang-split with both Bopp branches kept to all orders, renormalized every
// step. Converges to the ground state; at finite beta the normalized field is
// the symbol of e^{-beta H/2} up to scale. Observables use the Bopp rule.
BlochResult bloch_quantum(const phasespace::PhaseSpaceField& f0,
                          const model::HamiltonianSpec& H, double d_beta,
                          long n_steps, long checkpoint_every = 0);

// Same skeleton with the generator truncated at order hbar^2:
// (1/2) H + (hbar^2/16)(V''(x) theta^2 + T''(p) lambda^2). At hbar = 0 this
// degenerates to the classical descent in exact arithmetic.
BlochResult bloch_semiclassical(const phasespace::PhaseSpaceField& f0,
                                const model::HamiltonianSpec& H, double d_beta,
                                long n_steps, long checkpoint_every = 0);

// Classical descent d Omega / d beta = -(1/2) H Omega: a pointwise kernel
// e^{-d_beta (H - H_min)/2} per step with per-step renormalization; the H_min
// shift keeps the kernel in range at large beta. Observables use the plain
// |Omega|^2 rule.
BlochResult bloch_classical(const phasespace::PhaseSpaceField& f0,
                            const model::HamiltonianSpec& H, double d_beta,
                            long n_steps, long checkpoint_every = 0);

struct SweepResult {
  BlochResult quantum;
  BlochResult semiclassical;
  BlochResult classical;
};

// Runs the three tiers from the uniform start on the config's grid. With
// n_threads >= 2 the tiers run concurrently; results are bytewise identical
// either way because the tiers share no mutable state.
SweepResult thermal_sweep(const model::RunConfig& cfg, int n_threads = 1);

}  // namespace waveop::imagtime
