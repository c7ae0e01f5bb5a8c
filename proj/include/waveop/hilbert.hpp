#pragma once

#include <Eigen/Dense>
#include <utility>

#include "waveop/model.hpp"

namespace waveop::hilbert {

// Dense complex operators on the truncated oscillator basis.
using OperatorMatrix = Eigen::MatrixXcd;
// Wave operator Omega with rho = Omega Omega^dagger; generally non-Hermitian.
using WaveOperatorMatrix = Eigen::MatrixXcd;
// Row-major flattening of an N x N operator into length N^2.
using VectorizedState = Eigen::VectorXcd;

// Doubled-space operators built from Kronecker products. All four are
// Hermitian; (x, p) commute with each other, (theta, lambda) are their
// conjugate pair.
struct BoppMatrices {
  Eigen::MatrixXcd x;
  Eigen::MatrixXcd p;
  Eigen::MatrixXcd theta;
  Eigen::MatrixXcd lambda;
};

bool is_hermitian(const Eigen::MatrixXcd& A, double tol = 1e-12);

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B);

// Truncated-ladder position and momentum. Both Hermitian;
// [X, P] = i hbar (1 - N |N-1><N-1|), the defect confined to the last level.
std::pair<OperatorMatrix, OperatorMatrix> build_position_momentum(int N,
                                                                  double hbar);

// Integrates i hbar dOmega/dt = [H, Omega] - Omega F with fixed-step RK4, or
// the exact eigendecomposition map Omega(t) = e^{-iHt/h} Omega0 e^{+i(H+F)t/h}
// when exact is set. t must be an integer multiple of dt (RK4 path).
WaveOperatorMatrix evolve_wave_operator(const WaveOperatorMatrix& omega0,
                                        const OperatorMatrix& H,
                                        const OperatorMatrix& F, double t,
                                        double dt, double hbar = 1.0,
                                        bool exact = false);

// rho = Omega Omega^dagger, Hermitian PSD by construction.
OperatorMatrix density_from_wave(const WaveOperatorMatrix& omega);

// Tr(Omega^dagger O Omega), divided by Tr(Omega^dagger Omega) when
// normalize is set. O must be Hermitian.
double expectation_wave(const WaveOperatorMatrix& omega,
                        const OperatorMatrix& O, bool normalize = true);

VectorizedState vectorize(const WaveOperatorMatrix& omega);
WaveOperatorMatrix devectorize(const VectorizedState& v);

// left_action(A) vec(Omega) = vec(A Omega), built as A (x) 1.
Eigen::MatrixXcd left_action(const Eigen::MatrixXcd& A);
// right_action(A) vec(Omega) = vec(Omega A), built as 1 (x) A^T.
Eigen::MatrixXcd right_action(const Eigen::MatrixXcd& A);

// rho recovered as the partial trace of |Omega><Omega| over the second
// factor; equals devectorize(v) devectorize(v)^dagger.
OperatorMatrix partial_trace_recover(const VectorizedState& v);

// x = (1 (x) X^T + X (x) 1)/2, p = (P (x) 1 + 1 (x) P^T)/2,
// theta = (1 (x) X^T - X (x) 1)/hbar, lambda = (P (x) 1 - 1 (x) P^T)/hbar.
BoppMatrices build_bopp_matrices(const OperatorMatrix& X,
                                 const OperatorMatrix& P, double hbar);

// Integrates i hbar d|Omega>/dt = (H (x) 1 - 1 (x) (H+F)^T)|Omega> with RK4.
VectorizedState evolve_vectorized(const VectorizedState& v,
                                  const OperatorMatrix& H,
                                  const OperatorMatrix& F, double t, double dt,
                                  double hbar = 1.0);

// (1 (x) U) v for unitary U; leaves the recovered density and every O (x) 1
// observable unchanged.
VectorizedState gauge_transform(const VectorizedState& v,
                                const OperatorMatrix& U);

// Imaginary-time matrix flow dOmega/dbeta = -(H Omega + Omega H)/4 applied
// through the exact per-step kernel e^{-dbeta H/4}, renormalized to unit
// Frobenius norm each step. With Omega(0) = 1 this produces e^{-beta H/2} up
// to normalization.
WaveOperatorMatrix bloch_wave_operator(const OperatorMatrix& H, double d_beta,
                                       long n_steps);

}  // namespace waveop::hilbert
