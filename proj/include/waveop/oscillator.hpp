#pragma once

#include <Eigen/Dense>

namespace waveop::oscillator {

// Annihilation operator on the N-level truncated ladder: a|n> = sqrt(n)|n-1>.
Eigen::MatrixXcd annihilation(int N);

// Hermite-function matrix Phi(i, n) = phi_n(x_i) for the unit-frequency
// oscillator at the given hbar; stable three-term recurrence. Columns are the
// first N basis wavefunctions sampled on x.
Eigen::MatrixXd wavefunctions(int N, const Eigen::VectorXd& x, double hbar);

// Normalized coherent-state ladder coefficients for a displacement to
// (x0, p0): alpha = (x0 + i p0) / sqrt(2 hbar).
Eigen::VectorXcd coherent_vector(int N, double x0, double p0, double hbar);

}  // namespace waveop::oscillator
