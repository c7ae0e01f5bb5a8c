#include "waveop/imagtime.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "split_engine.hpp"

namespace waveop::imagtime {

using phasespace::ExpectationRule;
using phasespace::PhaseSpaceField;
using phasespace::RowMatrixXcd;
using phasespace::SpectralPlan;

namespace {

void check_descent_args(const PhaseSpaceField& f0, double d_beta, long n_steps,
                        long& checkpoint_every) {
  if (f0.values.rows() != f0.grid.nx || f0.values.cols() != f0.grid.np)
    throw std::invalid_argument("field shape does not match its grid");
  if (!(d_beta > 0.0) || !std::isfinite(d_beta))
    throw std::invalid_argument("d_beta must be positive and finite");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (checkpoint_every == 0) checkpoint_every = n_steps;
  if (checkpoint_every < 1 || checkpoint_every > n_steps)
    throw std::invalid_argument("checkpoint_every must lie in [1, n_steps]");
}

void record_row(ObservableSeries& series, const PhaseSpaceField& f,
                const model::HamiltonianSpec& H, ExpectationRule rule,
                double beta, double prerenorm) {
  const phasespace::PhaseMoments m = phasespace::phase_moments(f, H, rule);
  series.axis.push_back(beta);
  series.energy.push_back(m.energy);
  series.dx.push_back(m.dx);
  series.dp.push_back(m.dp);
  series.dxdp.push_back(m.dx * m.dp);
  series.norm_prerenorm.push_back(prerenorm);
}

BlochResult bloch_split(const PhaseSpaceField& f0,
                        const model::HamiltonianSpec& H, double d_beta,
                        long n_steps, long checkpoint_every,
                        bool full_quantum) {
  check_descent_args(f0, d_beta, n_steps, checkpoint_every);
  const double hbar = f0.hbar;
  if (full_quantum && !(hbar > 0.0))
    throw std::invalid_argument("quantum descent needs hbar > 0");

  const model::GridSpec& g = f0.grid;
  SpectralPlan plan(g.nx, g.np, g.dx(), g.dp());

  phasespace::engine::Factors fac;
  if (full_quantum) {
    fac.kinetic_half =
        phasespace::engine::mixed_x_multiplier(plan, g, [&](double lam,
                                                            double p) {
          const double gen =
              0.25 *
              (model::eval_polynomial(H.kinetic_coeffs, p + 0.5 * hbar * lam) +
               model::eval_polynomial(H.kinetic_coeffs, p - 0.5 * hbar * lam));
          return std::complex<double>(std::exp(-0.5 * d_beta * gen), 0.0);
        });
    fac.potential_full =
        phasespace::engine::mixed_p_multiplier(plan, g, [&](double x,
                                                            double th) {
          const double gen =
              0.25 *
              (model::eval_polynomial(H.potential_coeffs,
                                      x - 0.5 * hbar * th) +
               model::eval_polynomial(H.potential_coeffs,
                                      x + 0.5 * hbar * th));
          return std::complex<double>(std::exp(-d_beta * gen), 0.0);
        });
  } else {
    const double h2 = hbar * hbar / 16.0;
    fac.kinetic_half =
        phasespace::engine::mixed_x_multiplier(plan, g, [&](double lam,
                                                            double p) {
          const double gen =
              0.5 * model::eval_polynomial(H.kinetic_coeffs, p) +
              h2 * model::eval_polynomial_derivative(H.kinetic_coeffs, p, 2) *
                  lam * lam;
          return std::complex<double>(std::exp(-0.5 * d_beta * gen), 0.0);
        });
    fac.potential_full =
        phasespace::engine::mixed_p_multiplier(plan, g, [&](double x,
                                                            double th) {
          const double gen =
              0.5 * model::eval_polynomial(H.potential_coeffs, x) +
              h2 * model::eval_polynomial_derivative(H.potential_coeffs, x,
                                                     2) *
                  th * th;
          return std::complex<double>(std::exp(-d_beta * gen), 0.0);
        });
  }

  BlochResult res;
  res.series.tier = full_quantum ? "quantum" : "semiclassical";
  res.field = f0;
  std::vector<double> renorms;
  long done = 0;
  while (done < n_steps) {
    const long block = std::min(checkpoint_every, n_steps - done);
    renorms.clear();
    for (long s = 0; s < block; ++s)
      phasespace::engine::strang_step(res.field, plan, fac, &renorms);
    done += block;
    const double tail = phasespace::spectral_tail_mass(res.field);
    if (tail > 1e-4)
      throw NumericalError("spectral aliasing guard: tail mass " +
                           std::to_string(tail) +
                           " exceeds 1e-4; enlarge or refine the grid");
    record_row(res.series, res.field, H, ExpectationRule::bopp,
               static_cast<double>(done) * d_beta, renorms.back());
  }
  return res;
}

}  // namespace

PhaseSpaceField uniform_initial_field(const model::GridSpec& grid,
                                      double hbar) {
  PhaseSpaceField f = phasespace::make_field(grid, hbar);
  const double cell = (grid.x_max - grid.x_min) * (grid.p_max - grid.p_min);
  f.values.setConstant(1.0 / std::sqrt(cell));
  return f;
}

BlochResult bloch_quantum(const PhaseSpaceField& f0,
                          const model::HamiltonianSpec& H, double d_beta,
                          long n_steps, long checkpoint_every) {
  return bloch_split(f0, H, d_beta, n_steps, checkpoint_every, true);
}

BlochResult bloch_semiclassical(const PhaseSpaceField& f0,
                                const model::HamiltonianSpec& H, double d_beta,
                                long n_steps, long checkpoint_every) {
  return bloch_split(f0, H, d_beta, n_steps, checkpoint_every, false);
}

BlochResult bloch_classical(const PhaseSpaceField& f0,
                            const model::HamiltonianSpec& H, double d_beta,
                            long n_steps, long checkpoint_every) {
  check_descent_args(f0, d_beta, n_steps, checkpoint_every);
  const model::GridSpec& g = f0.grid;

  double h_min = eval_hamiltonian(H, g.x(0), g.p(0));
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.np; ++j)
      h_min = std::min(h_min, eval_hamiltonian(H, g.x(i), g.p(j)));

  // Shifting by H_min keeps the kernel's largest entry at 1, so repeated
  // multiplication stays in range for any beta; points where H - H_min is
  // huge flush to zero, which is the correct limit.
  Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> kernel(
      g.nx, g.np);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.np; ++j)
      kernel(i, j) =
          std::exp(-0.5 * d_beta * (eval_hamiltonian(H, g.x(i), g.p(j)) -
                                    h_min));

  BlochResult res;
  res.series.tier = "classical";
  res.field = f0;
  long done = 0;
  double last_prerenorm = 1.0;
  while (done < n_steps) {
    const long block = std::min(checkpoint_every, n_steps - done);
    for (long s = 0; s < block; ++s) {
      res.field.values.array() *= kernel.cast<std::complex<double>>();
      const double nrm = std::sqrt(res.field.norm2());
      if (!(nrm > 1e-300))
        throw NumericalError("classical descent: field norm underflow");
      res.field.values /= nrm;
      last_prerenorm = nrm;
    }
    done += block;
    record_row(res.series, res.field, H, ExpectationRule::plain,
               static_cast<double>(done) * d_beta, last_prerenorm);
  }
  return res;
}

SweepResult thermal_sweep(const model::RunConfig& cfg, int n_threads) {
  const auto problems = model::validate_config(cfg);
  if (!problems.empty()) throw ConfigError(problems.front());

  const model::GridSpec& g = cfg.grid;
  const double hbar = cfg.hamiltonian.hbar;
  const PhaseSpaceField start = uniform_initial_field(g, hbar);

  SweepResult out;
  if (n_threads >= 2) {
    std::exception_ptr errs[3] = {nullptr, nullptr, nullptr};
    auto guard = [&](int slot, auto&& fn) {
      try {
        fn();
      } catch (...) {
        errs[slot] = std::current_exception();
      }
    };
    std::thread tq([&] {
      guard(0, [&] {
        out.quantum = bloch_quantum(start, cfg.hamiltonian, cfg.step,
                                    cfg.n_steps, cfg.checkpoint_every);
      });
    });
    std::thread ts([&] {
      guard(1, [&] {
        out.semiclassical =
            bloch_semiclassical(start, cfg.hamiltonian, cfg.step, cfg.n_steps,
                                cfg.checkpoint_every);
      });
    });
    std::thread tc([&] {
      guard(2, [&] {
        out.classical = bloch_classical(start, cfg.hamiltonian, cfg.step,
                                        cfg.n_steps, cfg.checkpoint_every);
      });
    });
    tq.join();
    ts.join();
    tc.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  } else {
    out.quantum = bloch_quantum(start, cfg.hamiltonian, cfg.step, cfg.n_steps,
                                cfg.checkpoint_every);
    out.semiclassical = bloch_semiclassical(start, cfg.hamiltonian, cfg.step,
                                            cfg.n_steps, cfg.checkpoint_every);
    out.classical = bloch_classical(start, cfg.hamiltonian, cfg.step,
                                    cfg.n_steps, cfg.checkpoint_every);
  }
  return out;
}

}  // namespace waveop::imagtime
