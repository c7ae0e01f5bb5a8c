#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace waveop {

// Invalid configuration or malformed input files. The CLI maps this to exit
// code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Resolution or stability diagnostics raised by the numerical kernels. The
// CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace model {

// Separable polynomial Hamiltonian H(x,p) = T(p) + V(x) with
// T(p) = sum_k kinetic_coeffs[k] p^k and V(x) = sum_k potential_coeffs[k] x^k.
// Separability makes the Weyl symbol the naive polynomial and kills every
// mixed derivative, which the semiclassical generator relies on.
struct HamiltonianSpec {
  std::vector<double> kinetic_coeffs;
  std::vector<double> potential_coeffs;
  double hbar = 1.0;
  std::string label;

  // p^2/2 + x^n/2 for n in {2, 4}.
  static HamiltonianSpec benchmark(int n, double hbar = 1.0);
};

// Uniform periodic phase-space grid. Point layout is x_i = x_min + i*dx with
// dx = (x_max - x_min)/nx, so x_max itself is not a grid point.
struct GridSpec {
  double x_min = -8.0;
  double x_max = 8.0;
  double p_min = -8.0;
  double p_max = 8.0;
  int nx = 128;
  int np = 128;

  double dx() const { return (x_max - x_min) / nx; }
  double dp() const { return (p_max - p_min) / np; }
  double x(int i) const { return x_min + i * dx(); }
  double p(int j) const { return p_min + j * dp(); }
};

enum class RunMode {
  real_quantum,
  real_classical,
  imag_quantum,
  imag_semiclassical,
  imag_classical,
  imag_sweep,
  hilbert_real,
};

enum class PhaseGeneratorKind { zero, minus_h, polynomial };

// The free phase generator F. Polynomial kind means
// F = sum_k x_coeffs[k] x^k + sum_k p_coeffs[k] p^k (self-adjoint because the
// coefficients are real).
struct PhaseGeneratorSpec {
  PhaseGeneratorKind kind = PhaseGeneratorKind::zero;
  std::vector<double> x_coeffs;
  std::vector<double> p_coeffs;
};

struct RunConfig {
  int schema_version = 1;
  HamiltonianSpec hamiltonian;
  GridSpec grid;
  int basis_size = 32;  // hilbert_real only
  RunMode mode = RunMode::imag_sweep;
  double step = 1e-3;  // dt or dbeta
  long n_steps = 10000;
  long checkpoint_every = 500;
  PhaseGeneratorSpec phase_generator;
  double initial_x0 = 1.0;  // real-time initial coherent displacement
  double initial_p0 = 0.0;
  std::string output_path = "run";
  bool write_field = false;
};

double eval_polynomial(const std::vector<double>& coeffs, double u);
// order-th derivative of the polynomial at u; exact (falling factorials).
double eval_polynomial_derivative(const std::vector<double>& coeffs, double u,
                                  int order);
std::vector<double> differentiate_coeffs(const std::vector<double>& coeffs,
                                         int order);
int polynomial_degree(const std::vector<double>& coeffs);

// T(p) + V(x). Throws std::domain_error on non-finite input.
double eval_hamiltonian(const HamiltonianSpec& spec, double x, double p);

// d^i/dx^i d^j/dp^j H(x,p). Mixed orders (i>0 and j>0) are exactly zero for
// the separable form.
double eval_derivatives(const HamiltonianSpec& spec, double x, double p, int i,
                        int j);

// Returns human-readable violations; empty means the config is runnable.
std::vector<std::string> validate_config(const RunConfig& cfg);

const char* mode_name(RunMode m);
bool parse_mode(const std::string& text, RunMode& out);
std::vector<std::string> mode_names();

// Plain-text config file: `schema_version = 1` followed by [hamiltonian],
// [grid], [run], [output] sections. Throws ConfigError on parse failure.
RunConfig load_config(const std::string& path);

}  // namespace model
}  // namespace waveop
