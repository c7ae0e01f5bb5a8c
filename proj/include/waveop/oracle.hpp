#pragma once

#include <Eigen/Dense>
#include <vector>

#include "waveop/model.hpp"

// Independent reference implementations used to validate the main paths. No
// propagation code is shared with the engine modules: the ladder, transforms
// and integrators here are built locally and kept deliberately plain.
namespace waveop::oracle {

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;    // ascending
  Eigen::MatrixXcd eigenvectors;  // orthonormal columns, oscillator basis
  int basis_size = 0;
  double convergence_estimate = 0.0;  // |E0(N) - E0(N/2)|
};

struct ThermalObservables {
  double energy = 0.0;
  double dx = 0.0;
  double dp = 0.0;
};

// Diagonalizes T(P) + V(X) on the N-level truncated ladder. The convergence
// estimate compares the ground energy against the half-size basis.
SpectralDecomposition decompose(const model::HamiltonianSpec& H, int N);

// Thermal observables of rho ~ e^{-beta H} from the truncated-ladder
// spectrum. Throws NumericalError with a suggested basis size when the
// ground energy has not converged to 1e-8.
ThermalObservables exact_diag_thermal(const model::HamiltonianSpec& H, int N,
                                      double beta);

struct DensityTrajectory {
  std::vector<double> times;  // t = 0 excluded
  std::vector<Eigen::MatrixXcd> states;
};

// Fixed-step RK4 integration of i hbar d rho / dt = [H, rho]. rho0 must be
// Hermitian, positive semidefinite and trace one; t a multiple of dt.
DensityTrajectory liouville_direct(const Eigen::MatrixXcd& rho0,
                                   const Eigen::MatrixXcd& H, double t,
                                   double dt, double hbar = 1.0,
                                   long checkpoint_every = 1);

// Moments of the classical Gibbs weight e^{-beta H(x,p)} by separable
// Gauss-Legendre quadrature, domain auto-expanded until the boundary weight
// is negligible and the node count doubled to a 1e-8 relative error.
// Non-confining T or V raises ConfigError.
ThermalObservables classical_gibbs_quadrature(const model::HamiltonianSpec& H,
                                              double beta);

// Dense-matrix realization of the order-hbar^2 Bloch generator on a coarse
// grid: spectral differentiation matrices for theta^2 and lambda^2, one
// symmetric eigendecomposition, exact exponential in beta. Grids above 64x64
// are refused (dense dimension nx*np). Observables follow the shifted-
// argument rule realized with dense transform matrices.
ThermalObservables semiclassical_dense_reference(
    const model::HamiltonianSpec& H, const model::GridSpec& grid, double beta);

}  // namespace waveop::oracle
