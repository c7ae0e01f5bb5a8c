#include "waveop/hilbert.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "waveop/oscillator.hpp"

namespace waveop::hilbert {

namespace {
constexpr std::complex<double> kI(0.0, 1.0);

long step_count(double t, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
  const double ratio = t / dt;
  const long n = static_cast<long>(std::llround(ratio));
  if (n < 0 || std::abs(ratio - static_cast<double>(n)) > 1e-9)
    throw std::invalid_argument("evolve: t must be a non-negative integer multiple of dt");
  return n;
}
}  // namespace

bool is_hermitian(const Eigen::MatrixXcd& A, double tol) {
  if (A.rows() != A.cols()) return false;
  return (A - A.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
  Eigen::MatrixXcd out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

std::pair<OperatorMatrix, OperatorMatrix> build_position_momentum(int N,
                                                                  double hbar) {
  if (N < 2) throw std::invalid_argument("build_position_momentum: N must be >= 2");
  if (!(hbar > 0.0))
    throw std::invalid_argument("build_position_momentum: hbar must be positive");
  const Eigen::MatrixXcd a = oscillator::annihilation(N);
  const Eigen::MatrixXcd ad = a.adjoint();
  const double s = std::sqrt(hbar / 2.0);
  OperatorMatrix X = s * (a + ad);
  OperatorMatrix P = kI * s * (ad - a);
  return {std::move(X), std::move(P)};
}

WaveOperatorMatrix evolve_wave_operator(const WaveOperatorMatrix& omega0,
                                        const OperatorMatrix& H,
                                        const OperatorMatrix& F, double t,
                                        double dt, double hbar, bool exact) {
  if (H.rows() != omega0.rows() || F.rows() != omega0.rows() ||
      H.rows() != H.cols() || F.rows() != F.cols())
    throw std::invalid_argument("evolve_wave_operator: dimension mismatch");
  if (!is_hermitian(H, 1e-10) || !is_hermitian(F, 1e-10))
    throw std::invalid_argument("evolve_wave_operator: H and F must be Hermitian");

  if (exact) {
    // Omega(t) = e^{-iHt/h} Omega0 e^{+i(H+F)t/h}; both factors unitary.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esH(H);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esK(H + F);
    const Eigen::VectorXcd phL =
        (-kI * (t / hbar) * esH.eigenvalues().cast<std::complex<double>>().array())
            .exp()
            .matrix();
    const Eigen::VectorXcd phR =
        (kI * (t / hbar) * esK.eigenvalues().cast<std::complex<double>>().array())
            .exp()
            .matrix();
    const Eigen::MatrixXcd UL =
        esH.eigenvectors() * phL.asDiagonal() * esH.eigenvectors().adjoint();
    const Eigen::MatrixXcd UR =
        esK.eigenvectors() * phR.asDiagonal() * esK.eigenvectors().adjoint();
    return UL * omega0 * UR;
  }

  const long n = step_count(t, dt);
  const Eigen::MatrixXcd K = H + F;
  const std::complex<double> c = -kI / hbar;
  const double norm0 = omega0.norm();
  auto rhs = [&](const Eigen::MatrixXcd& w) -> Eigen::MatrixXcd {
    return c * (H * w - w * K);
  };
  WaveOperatorMatrix w = omega0;
  for (long k = 0; k < n; ++k) {
    const Eigen::MatrixXcd k1 = rhs(w);
    const Eigen::MatrixXcd k2 = rhs(w + 0.5 * dt * k1);
    const Eigen::MatrixXcd k3 = rhs(w + 0.5 * dt * k2);
    const Eigen::MatrixXcd k4 = rhs(w + dt * k3);
    w += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (norm0 > 0.0 && w.norm() > 1e3 * norm0)
      throw NumericalError("evolve_wave_operator: step instability, norm grew beyond 1e3x");
  }
  return w;
}

OperatorMatrix density_from_wave(const WaveOperatorMatrix& omega) {
  return omega * omega.adjoint();
}

double expectation_wave(const WaveOperatorMatrix& omega,
                        const OperatorMatrix& O, bool normalize) {
  if (O.rows() != omega.rows() || O.rows() != O.cols())
    throw std::invalid_argument("expectation_wave: dimension mismatch");
  if (!is_hermitian(O, 1e-10))
    throw std::invalid_argument("expectation_wave: O must be Hermitian");
  const std::complex<double> raw = (omega.adjoint() * O * omega).trace();
  double value = raw.real();
  if (normalize) {
    const double nrm = omega.squaredNorm();  // Tr(Omega^dagger Omega)
    if (nrm < 1e-300)
      throw NumericalError("expectation_wave: zero-norm wave operator");
    value /= nrm;
  }
  return value;
}

VectorizedState vectorize(const WaveOperatorMatrix& omega) {
  const auto N = omega.rows();
  VectorizedState v(N * omega.cols());
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < omega.cols(); ++j) v(i * omega.cols() + j) = omega(i, j);
  return v;
}

WaveOperatorMatrix devectorize(const VectorizedState& v) {
  const auto len = v.size();
  const auto N = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(len))));
  if (N * N != len)
    throw std::invalid_argument("devectorize: length is not a perfect square");
  WaveOperatorMatrix w(N, N);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j) w(i, j) = v(i * N + j);
  return w;
}

Eigen::MatrixXcd left_action(const Eigen::MatrixXcd& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("left_action: A must be square");
  return kron(A, Eigen::MatrixXcd::Identity(A.rows(), A.cols()));
}

Eigen::MatrixXcd right_action(const Eigen::MatrixXcd& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("right_action: A must be square");
  return kron(Eigen::MatrixXcd::Identity(A.rows(), A.cols()), A.transpose());
}

OperatorMatrix partial_trace_recover(const VectorizedState& v) {
  const WaveOperatorMatrix w = devectorize(v);
  // Tr' |Omega><Omega| over the second factor: rho_{ik} = sum_j w_{ij} w*_{kj}
  return w * w.adjoint();
}

BoppMatrices build_bopp_matrices(const OperatorMatrix& X,
                                 const OperatorMatrix& P, double hbar) {
  if (X.rows() != X.cols() || P.rows() != P.cols() || X.rows() != P.rows())
    throw std::invalid_argument("build_bopp_matrices: dimension mismatch");
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(X.rows(), X.cols());
  const Eigen::MatrixXcd XL = kron(X, I), XR = kron(I, X.transpose());
  const Eigen::MatrixXcd PL = kron(P, I), PR = kron(I, P.transpose());
  BoppMatrices b;
  b.x = 0.5 * (XR + XL);
  b.p = 0.5 * (PL + PR);
  b.theta = (XR - XL) / hbar;
  b.lambda = (PL - PR) / hbar;
  return b;
}

VectorizedState evolve_vectorized(const VectorizedState& v,
                                  const OperatorMatrix& H,
                                  const OperatorMatrix& F, double t, double dt,
                                  double hbar) {
  if (!is_hermitian(H, 1e-10) || !is_hermitian(F, 1e-10))
    throw std::invalid_argument("evolve_vectorized: H and F must be Hermitian");
  const auto N = H.rows();
  if (v.size() != N * N)
    throw std::invalid_argument("evolve_vectorized: dimension mismatch");
  const long n = step_count(t, dt);
  const Eigen::MatrixXcd G =
      left_action(H) - right_action(H + F);  // H (x) 1 - 1 (x) (H+F)^T
  const std::complex<double> c = -kI / hbar;
  const double norm0 = v.norm();
  VectorizedState w = v;
  for (long k = 0; k < n; ++k) {
    const VectorizedState k1 = c * (G * w);
    const VectorizedState k2 = c * (G * (w + 0.5 * dt * k1));
    const VectorizedState k3 = c * (G * (w + 0.5 * dt * k2));
    const VectorizedState k4 = c * (G * (w + dt * k3));
    w += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (norm0 > 0.0 && w.norm() > 1e3 * norm0)
      throw NumericalError("evolve_vectorized: step instability, norm grew beyond 1e3x");
  }
  return w;
}

VectorizedState gauge_transform(const VectorizedState& v,
                                const OperatorMatrix& U) {
  const auto N = U.rows();
  if (U.cols() != N || v.size() != N * N)
    throw std::invalid_argument("gauge_transform: dimension mismatch");
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
  if ((U * U.adjoint() - I).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("gauge_transform: U must be unitary");
  // (1 (x) U) vec(Omega) = vec(Omega U^T)
  const WaveOperatorMatrix w = devectorize(v);
  return vectorize(w * U.transpose());
}

WaveOperatorMatrix bloch_wave_operator(const OperatorMatrix& H, double d_beta,
                                       long n_steps) {
  if (!is_hermitian(H, 1e-10))
    throw std::invalid_argument("bloch_wave_operator: H must be Hermitian");
  if (!(d_beta > 0.0) || n_steps < 1)
    throw std::invalid_argument("bloch_wave_operator: need d_beta > 0, n_steps >= 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  // exact step kernel relative to the ground level, so no underflow at any
  // temperature: e^{-dbeta (H - E0)/4}
  const Eigen::VectorXd shifted =
      (-0.25 * d_beta * (es.eigenvalues().array() - es.eigenvalues()(0)))
          .exp()
          .matrix();
  const Eigen::MatrixXcd kernel = es.eigenvectors() *
                                  shifted.cast<std::complex<double>>().asDiagonal() *
                                  es.eigenvectors().adjoint();
  WaveOperatorMatrix w = Eigen::MatrixXcd::Identity(H.rows(), H.cols());
  for (long k = 0; k < n_steps; ++k) {
    w = kernel * w * kernel;
    w /= w.norm();
  }
  return w;
}

}  // namespace waveop::hilbert
