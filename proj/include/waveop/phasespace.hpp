#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <vector>

#include "waveop/model.hpp"

namespace waveop::phasespace {

// Row-major so the memory layout matches the binary snapshot format and the
// strided transform plans.
using RowMatrixXcd =
    Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic,
                  Eigen::RowMajor>;

// Omega(x, p) sampled on a uniform periodic grid: values(i, j) = Omega(x_i, p_j).
struct PhaseSpaceField {
  model::GridSpec grid;
  double hbar = 1.0;
  RowMatrixXcd values;

  // integral |Omega|^2 dx dp, accumulated in fixed row-major order
  double norm2() const;
  void normalize();  // throws NumericalError when the norm underflows
};

PhaseSpaceField make_field(const model::GridSpec& grid, double hbar);

// Coherent-state correspondence field sqrt(2/(pi hbar)) *
// exp(-((x-x0)^2 + (p-p0)^2)/hbar); unit L2 norm for contained supports.
PhaseSpaceField coherent_field(const model::GridSpec& grid, double hbar,
                               double x0, double p0);

// FFTW-backed transforms between the position representation and the two
// mixed representations: along-x (frequency lambda, realizing -i d/dx) and
// along-p (frequency theta, realizing -i d/dp). Frequencies are stored in
// standard wraparound order with the Nyquist mode counted negative. Plans use
// FFTW_ESTIMATE so planning is deterministic and results are reproducible
// byte-for-byte across runs and thread counts.
class SpectralPlan {
 public:
  SpectralPlan(int nx, int np, double dx, double dp);
  ~SpectralPlan();
  SpectralPlan(const SpectralPlan&) = delete;
  SpectralPlan& operator=(const SpectralPlan&) = delete;

  int nx() const { return nx_; }
  int np() const { return np_; }
  const std::vector<double>& lambda() const { return lambda_; }
  const std::vector<double>& theta() const { return theta_; }

  // Unnormalized transforms; forward followed by backward multiplies by the
  // axis length. Propagator multipliers fold the 1/n in.
  void forward_x(RowMatrixXcd& f) const;
  void backward_x(RowMatrixXcd& f) const;
  void forward_p(RowMatrixXcd& f) const;
  void backward_p(RowMatrixXcd& f) const;

 private:
  int nx_, np_;
  std::vector<double> lambda_, theta_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

// Weyl symbol A(x,p) = integral dy <x-y/2|A|x+y/2> e^{ipy/hbar} with the
// normalization that maps the identity to the constant 1. Operators that are
// exactly low-degree polynomials in the ladder X, P get their polynomial
// symbol directly; everything else goes through the sampled position kernel,
// which requires the operator's support to fit the grid (boundary kernel mass
// above 1e-6 of the total raises NumericalError).
PhaseSpaceField wigner_weyl_of_operator(const Eigen::MatrixXcd& A,
                                        const model::GridSpec& grid,
                                        double hbar);

// Moyal product of two sampled fields via the twisted spectral convolution.
// Exact to spectral accuracy for band-limited periodic fields.
PhaseSpaceField moyal_star(const PhaseSpaceField& f, const PhaseSpaceField& g);

// Moyal product of two separable polynomial symbols through the terminating
// derivative series; exact for polynomials (no periodization error).
PhaseSpaceField moyal_star(const model::HamiltonianSpec& f,
                           const model::HamiltonianSpec& g,
                           const model::GridSpec& grid, double hbar);

struct FieldTrajectory {
  std::vector<double> times;           // checkpoint times, t=0 excluded
  std::vector<PhaseSpaceField> fields;  // field after each checkpoint block
};

// Strang-split real-time propagation of
// i hbar dOmega/dt = [H(x - h theta/2, p + h lambda/2)
//                     - H(x + h theta/2, p - h lambda/2)] Omega - (F phase),
// kinetic factors diagonal in (lambda, p), potential factors in (x, theta).
// F, when given, is a real symbol applied as the multiplicative phase
// e^{+i dt F/hbar}. Checkpoints also run the spectral aliasing guard.
FieldTrajectory propagate_quantum_real(const PhaseSpaceField& f0,
                                       const model::HamiltonianSpec& H,
                                       const PhaseSpaceField* F, double dt,
                                       long n_steps, long checkpoint_every);

// Split advection of dOmega/dt = {H, Omega} - i F Omega: the T'(p) d/dx term
// exact in (lambda, p), the V'(x) d/dp term exact in (x, theta), F applied as
// e^{-i dt F}.
FieldTrajectory propagate_classical_real(const PhaseSpaceField& f0,
                                         const model::HamiltonianSpec& H,
                                         const PhaseSpaceField* F, double dt,
                                         long n_steps, long checkpoint_every);

enum class ExpectationRule {
  bopp,   // O(x - h theta/2, p + h lambda/2), the operator expectation
  plain,  // integral O(x,p) |Omega|^2, the classical (h -> 0) rule
};

// <O> for a separable polynomial observable symbol, evaluated in the mixed
// representations where the Bopp-shifted factors are diagonal. Imaginary
// residue beyond 1e-8 of the magnitude raises NumericalError.
double expectation_phase(const PhaseSpaceField& f,
                         const model::HamiltonianSpec& O,
                         ExpectationRule rule = ExpectationRule::bopp,
                         bool normalize = true);

// Moments used by the observable series: energy plus the Bopp-shifted (or
// plain) first and second moments of x and p.
struct PhaseMoments {
  double energy, mean_x, mean_p, dx, dp;
};
PhaseMoments phase_moments(const PhaseSpaceField& f,
                           const model::HamiltonianSpec& H,
                           ExpectationRule rule);

// sqrt(2 pi hbar) W(x,p) for the pure state |psi><psi|, psi sampled on the
// grid's x lattice. Unit L2 norm for contained states (purity identity).
PhaseSpaceField pure_state_wave_field(const Eigen::VectorXcd& psi,
                                      const model::GridSpec& grid,
                                      double hbar);

// Fraction of spectral mass in the outer eighth of the frequency band along
// either axis; propagation checkpoints raise NumericalError above 1e-4.
double spectral_tail_mass(const PhaseSpaceField& f);

}  // namespace waveop::phasespace
