#pragma once

// Shared Strang stepping core for the real- and imaginary-time grid
// propagators. Private to the library sources.

#include <functional>
#include <vector>

#include "waveop/phasespace.hpp"

namespace waveop::phasespace::engine {

// Multiplier banks for one symmetric step: half/full kinetic factors live in
// the (lambda, p) representation with the 1/nx of the inverse transform
// folded in, the full potential factor in (x, theta) with 1/np folded in, and
// the optional pointwise phase factor in (x, p).
struct Factors {
  RowMatrixXcd kinetic_half;
  RowMatrixXcd potential_full;
  RowMatrixXcd phase_half;  // size 0 when no phase generator
};

template <class Fn>
RowMatrixXcd mixed_x_multiplier(const SpectralPlan& plan,
                                const model::GridSpec& grid, Fn&& fn) {
  RowMatrixXcd m(plan.nx(), plan.np());
  for (int k = 0; k < plan.nx(); ++k)
    for (int j = 0; j < plan.np(); ++j)
      m(k, j) = fn(plan.lambda()[static_cast<std::size_t>(k)], grid.p(j)) /
                static_cast<double>(plan.nx());
  return m;
}

template <class Fn>
RowMatrixXcd mixed_p_multiplier(const SpectralPlan& plan,
                                const model::GridSpec& grid, Fn&& fn) {
  RowMatrixXcd m(plan.nx(), plan.np());
  for (int i = 0; i < plan.nx(); ++i)
    for (int k = 0; k < plan.np(); ++k)
      m(i, k) = fn(grid.x(i), plan.theta()[static_cast<std::size_t>(k)]) /
                static_cast<double>(plan.np());
  return m;
}

inline void apply_kinetic(PhaseSpaceField& f, const SpectralPlan& plan,
                          const RowMatrixXcd& mult) {
  plan.forward_x(f.values);
  f.values.array() *= mult.array();
  plan.backward_x(f.values);
}

inline void apply_potential(PhaseSpaceField& f, const SpectralPlan& plan,
                            const RowMatrixXcd& mult) {
  plan.forward_p(f.values);
  f.values.array() *= mult.array();
  plan.backward_p(f.values);
}

// One symmetric step: [phase/2] K/2 P K/2 [phase/2]. When renorm_log is
// given the field is rescaled to unit L2 norm afterwards and the
// pre-renormalization norm appended.
inline void strang_step(PhaseSpaceField& f, const SpectralPlan& plan,
                        const Factors& fac, std::vector<double>* renorm_log) {
  const bool phased = fac.phase_half.size() != 0;
  if (phased) f.values.array() *= fac.phase_half.array();
  apply_kinetic(f, plan, fac.kinetic_half);
  apply_potential(f, plan, fac.potential_full);
  apply_kinetic(f, plan, fac.kinetic_half);
  if (phased) f.values.array() *= fac.phase_half.array();
  if (renorm_log) {
    const double nrm = std::sqrt(f.norm2());
    if (!(nrm > 1e-300))
      throw NumericalError("strang_step: field norm underflow");
    f.values /= nrm;
    renorm_log->push_back(nrm);
  }
}

}  // namespace waveop::phasespace::engine
