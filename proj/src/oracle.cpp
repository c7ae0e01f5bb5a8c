#include "waveop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace waveop::oracle {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::complex<double> kI(0.0, 1.0);

struct Ladder {
  Eigen::MatrixXcd X, P;
};

// Ladder pair built in place: a|n> = sqrt(n)|n-1>, X = s(a + a^t),
// P = i s(a^t - a), s = sqrt(hbar/2). Kept local so the oracle shares no
// operator plumbing with the engine modules.
Ladder build_ladder(int N, double hbar) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(N, N);
  for (int n = 1; n < N; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  const double s = std::sqrt(0.5 * hbar);
  Ladder l;
  l.X = s * (a + a.adjoint());
  l.P = kI * s * (a.adjoint() - a);
  return l;
}

// sum_k c_k M^k by repeated multiplication.
Eigen::MatrixXcd matrix_polynomial(const std::vector<double>& c,
                                   const Eigen::MatrixXcd& M) {
  const Eigen::Index N = M.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(N, N);
  Eigen::MatrixXcd power = Eigen::MatrixXcd::Identity(N, N);
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k] != 0.0) out += c[k] * power;
    if (k + 1 < c.size()) power = power * M;
  }
  return out;
}

Eigen::MatrixXcd ladder_hamiltonian(const model::HamiltonianSpec& H, int N) {
  const Ladder l = build_ladder(N, H.hbar);
  Eigen::MatrixXcd Hm = matrix_polynomial(H.kinetic_coeffs, l.P) +
                        matrix_polynomial(H.potential_coeffs, l.X);
  return 0.5 * (Hm + Hm.adjoint().eval());
}

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("beta must be positive and finite");
}

}  // namespace

SpectralDecomposition decompose(const model::HamiltonianSpec& H, int N) {
  if (N < 4) throw std::invalid_argument("basis size must be at least 4");
  if (!(H.hbar > 0.0)) throw std::invalid_argument("hbar must be positive");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> full(ladder_hamiltonian(H, N));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> half(
      ladder_hamiltonian(H, N / 2), Eigen::EigenvaluesOnly);
  if (full.info() != Eigen::Success || half.info() != Eigen::Success)
    throw NumericalError("eigensolver failed on the ladder Hamiltonian");

  SpectralDecomposition d;
  d.eigenvalues = full.eigenvalues();
  d.eigenvectors = full.eigenvectors();
  d.basis_size = N;
  d.convergence_estimate =
      std::abs(full.eigenvalues()(0) - half.eigenvalues()(0));
  return d;
}

ThermalObservables exact_diag_thermal(const model::HamiltonianSpec& H, int N,
                                      double beta) {
  check_beta(beta);
  const SpectralDecomposition d = decompose(H, N);
  if (d.convergence_estimate >= 1e-8)
    throw NumericalError(
        "ground energy unconverged at basis size " + std::to_string(N) +
        " (|E0(N) - E0(N/2)| = " + std::to_string(d.convergence_estimate) +
        "); retry with N = " + std::to_string(2 * N));

  const Ladder l = build_ladder(N, H.hbar);
  const Eigen::MatrixXcd Xe =
      d.eigenvectors.adjoint() * l.X * d.eigenvectors;
  const Eigen::MatrixXcd Pe =
      d.eigenvectors.adjoint() * l.P * d.eigenvectors;
  const Eigen::MatrixXcd X2e = Xe * Xe;
  const Eigen::MatrixXcd P2e = Pe * Pe;

  const double e0 = d.eigenvalues(0);
  double z = 0.0, se = 0.0, sx = 0.0, sx2 = 0.0, sp = 0.0, sp2 = 0.0;
  for (int n = 0; n < N; ++n) {
    const double w = std::exp(-beta * (d.eigenvalues(n) - e0));
    z += w;
    se += w * d.eigenvalues(n);
    sx += w * Xe(n, n).real();
    sx2 += w * X2e(n, n).real();
    sp += w * Pe(n, n).real();
    sp2 += w * P2e(n, n).real();
  }

  ThermalObservables obs;
  obs.energy = se / z;
  const double mx = sx / z, mp = sp / z;
  obs.dx = std::sqrt(std::max(0.0, sx2 / z - mx * mx));
  obs.dp = std::sqrt(std::max(0.0, sp2 / z - mp * mp));
  return obs;
}

DensityTrajectory liouville_direct(const Eigen::MatrixXcd& rho0,
                                   const Eigen::MatrixXcd& H, double t,
                                   double dt, double hbar,
                                   long checkpoint_every) {
  if (rho0.rows() != rho0.cols() || H.rows() != H.cols() ||
      rho0.rows() != H.rows())
    throw std::invalid_argument("rho0 and H must be square and equal-sized");
  if (!(hbar > 0.0)) throw std::invalid_argument("hbar must be positive");
  if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("rho0 must be Hermitian");
  if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("H must be Hermitian");
  if (std::abs(rho0.trace().real() - 1.0) > 1e-10 ||
      std::abs(rho0.trace().imag()) > 1e-10)
    throw std::invalid_argument("rho0 must have unit trace");
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho0,
                                                       Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -1e-10)
      throw std::invalid_argument("rho0 must be positive semidefinite");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const double ratio = t / dt;
  const long n_steps = static_cast<long>(std::llround(ratio));
  if (n_steps < 1 || std::abs(ratio - static_cast<double>(n_steps)) > 1e-9)
    throw std::invalid_argument("t must be a positive multiple of dt");
  if (checkpoint_every < 1 || checkpoint_every > n_steps)
    throw std::invalid_argument("checkpoint_every must lie in [1, n_steps]");

  const std::complex<double> c = -kI / hbar;
  auto rhs = [&](const Eigen::MatrixXcd& r) -> Eigen::MatrixXcd {
    return c * (H * r - r * H);
  };

  DensityTrajectory traj;
  Eigen::MatrixXcd rho = rho0;
  const double norm0 = rho.norm();
  for (long s = 1; s <= n_steps; ++s) {
    const Eigen::MatrixXcd k1 = rhs(rho);
    const Eigen::MatrixXcd k2 = rhs(rho + 0.5 * dt * k1);
    const Eigen::MatrixXcd k3 = rhs(rho + 0.5 * dt * k2);
    const Eigen::MatrixXcd k4 = rhs(rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (rho.norm() > 1e3 * norm0 + 10.0)
      throw NumericalError("liouville_direct: step instability, reduce dt");
    if (s % checkpoint_every == 0 || s == n_steps) {
      traj.times.push_back(static_cast<double>(s) * dt);
      traj.states.push_back(rho);
    }
  }
  return traj;
}

namespace {

struct Quadrature {
  Eigen::VectorXd nodes;    // on [-1, 1]
  Eigen::VectorXd weights;  // sum to 2
};

// Golub-Welsch on the Legendre Jacobi matrix.
Quadrature gauss_legendre(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Quadrature q;
  q.nodes = es.eigenvalues();
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    q.weights(i) = 2.0 * v0 * v0;
  }
  return q;
}

void check_confining(const std::vector<double>& coeffs, const char* which) {
  const int deg = model::polynomial_degree(coeffs);
  if (deg < 2 || deg % 2 != 0 ||
      coeffs[static_cast<std::size_t>(deg)] <= 0.0)
    throw ConfigError(std::string(which) +
                      " is non-confining; the Gibbs weight is not integrable");
}

struct AxisMoments {
  double mean = 0.0, second = 0.0, value = 0.0;  // <u>, <u^2>, <g(u)>
};

// Normalized moments of e^{-beta g(u)} over the line, computed on [-L, L]
// with L expanded until the endpoint weight is negligible, then the node
// count doubled to convergence.
AxisMoments gibbs_axis_moments(const std::vector<double>& coeffs,
                               double beta) {
  double gmin = model::eval_polynomial(coeffs, 0.0);
  double L = 2.0;
  for (;;) {
    for (int i = 0; i <= 400; ++i) {
      const double u = -L + 2.0 * L * i / 400.0;
      gmin = std::min(gmin, model::eval_polynomial(coeffs, u));
    }
    const double edge =
        std::max(std::exp(-beta * (model::eval_polynomial(coeffs, L) - gmin)),
                 std::exp(-beta * (model::eval_polynomial(coeffs, -L) - gmin)));
    if (edge < 1e-12) break;
    L *= 1.5;
    if (L > 1e6)
      throw NumericalError("quadrature domain expansion failed to terminate");
  }

  AxisMoments prev;
  for (int n = 100; n <= 6400; n *= 2) {
    const Quadrature q = gauss_legendre(n);
    double m0 = 0.0, m1 = 0.0, m2 = 0.0, mg = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = L * q.nodes(i);
      const double g = model::eval_polynomial(coeffs, u);
      const double w = q.weights(i) * std::exp(-beta * (g - gmin));
      m0 += w;
      m1 += w * u;
      m2 += w * u * u;
      mg += w * g;
    }
    AxisMoments cur;
    cur.mean = m1 / m0;
    cur.second = m2 / m0;
    cur.value = mg / m0;
    if (n > 100) {
      const double scale = std::max({1.0, std::abs(cur.second),
                                     std::abs(cur.value)});
      if (std::abs(cur.mean - prev.mean) <= 1e-10 * scale &&
          std::abs(cur.second - prev.second) <= 1e-10 * scale &&
          std::abs(cur.value - prev.value) <= 1e-10 * scale)
        return cur;
    }
    prev = cur;
  }
  throw NumericalError("Gibbs quadrature did not converge");
}

}  // namespace

ThermalObservables classical_gibbs_quadrature(const model::HamiltonianSpec& H,
                                              double beta) {
  check_beta(beta);
  check_confining(H.potential_coeffs, "potential");
  check_confining(H.kinetic_coeffs, "kinetic term");

  const AxisMoments vx = gibbs_axis_moments(H.potential_coeffs, beta);
  const AxisMoments tp = gibbs_axis_moments(H.kinetic_coeffs, beta);

  ThermalObservables obs;
  obs.energy = vx.value + tp.value;
  obs.dx = std::sqrt(std::max(0.0, vx.second - vx.mean * vx.mean));
  obs.dp = std::sqrt(std::max(0.0, tp.second - tp.mean * tp.mean));
  return obs;
}

namespace {

std::vector<double> dense_frequencies(int n, double d) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const int kk = (k < (n + 1) / 2) ? k : k - n;
    w[static_cast<std::size_t>(k)] = 2.0 * kPi * kk / (n * d);
  }
  return w;
}

// Real circulant matrix of the operator "multiply by freq^2 in the spectral
// representation" on a periodic axis.
Eigen::MatrixXd spectral_square_matrix(int n, const std::vector<double>& freq) {
  Eigen::MatrixXd D(n, n);
  for (int j = 0; j < n; ++j)
    for (int jp = 0; jp < n; ++jp) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        const double f = freq[static_cast<std::size_t>(k)];
        s += f * f * std::cos(2.0 * kPi * k * (j - jp) / n);
      }
      D(j, jp) = s / n;
    }
  return D;
}

}  // namespace

ThermalObservables semiclassical_dense_reference(
    const model::HamiltonianSpec& H, const model::GridSpec& grid,
    double beta) {
  check_beta(beta);
  const int nx = grid.nx, np = grid.np;
  if (nx < 2 || np < 2) throw std::invalid_argument("grid too small");
  if (nx > 64 || np > 64)
    throw ConfigError("dense semiclassical reference is limited to 64x64");
  const double hbar = H.hbar;
  if (!(hbar >= 0.0)) throw std::invalid_argument("hbar must be non-negative");

  const std::vector<double> lam = dense_frequencies(nx, grid.dx());
  const std::vector<double> th = dense_frequencies(np, grid.dp());
  const Eigen::MatrixXd Dlam = spectral_square_matrix(nx, lam);
  const Eigen::MatrixXd Dth = spectral_square_matrix(np, th);

  const double h2 = hbar * hbar / 16.0;
  const int dim = nx * np;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < nx; ++i) {
    const double x = grid.x(i);
    const double vpp =
        model::eval_polynomial_derivative(H.potential_coeffs, x, 2);
    for (int j = 0; j < np; ++j) {
      const double p = grid.p(j);
      const int r = i * np + j;
      G(r, r) += 0.5 * model::eval_hamiltonian(H, x, p);
      const double tpp =
          model::eval_polynomial_derivative(H.kinetic_coeffs, p, 2);
      for (int jp = 0; jp < np; ++jp) G(r, i * np + jp) += h2 * vpp * Dth(j, jp);
      for (int ip = 0; ip < nx; ++ip) G(r, ip * np + j) += h2 * tpp * Dlam(i, ip);
    }
  }
  G = 0.5 * (G + G.transpose().eval());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  if (es.info() != Eigen::Success)
    throw NumericalError("dense generator eigensolver failed");
  const double mu0 = es.eigenvalues()(0);
  Eigen::VectorXd y = es.eigenvectors().transpose() * Eigen::VectorXd::Ones(dim);
  for (int k = 0; k < dim; ++k)
    y(k) *= std::exp(-beta * (es.eigenvalues()(k) - mu0));
  Eigen::VectorXd w = es.eigenvectors() * y;
  const double wn = w.norm();
  if (!(wn > 1e-300)) throw NumericalError("dense reference norm underflow");
  w /= wn;

  // Shifted-argument observables through dense transform matrices; at
  // hbar = 0 the arguments reduce to the plain grid coordinates.
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(nx, np);  // (x, theta)
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(nx, np);  // (lambda, p)
  for (int i = 0; i < nx; ++i)
    for (int k = 0; k < np; ++k) {
      std::complex<double> s = 0.0;
      for (int j = 0; j < np; ++j)
        s += w(i * np + j) * std::polar(1.0, -2.0 * kPi * j * k / np);
      a(i, k) = s;
    }
  for (int k = 0; k < nx; ++k)
    for (int j = 0; j < np; ++j) {
      std::complex<double> s = 0.0;
      for (int i = 0; i < nx; ++i)
        s += w(i * np + j) * std::polar(1.0, -2.0 * kPi * i * k / nx);
      b(k, j) = s;
    }

  double vn = 0.0, vo = 0.0, v1 = 0.0, v2 = 0.0;
  for (int i = 0; i < nx; ++i)
    for (int k = 0; k < np; ++k) {
      const double q = std::norm(a(i, k));
      const double u = grid.x(i) - 0.5 * hbar * th[static_cast<std::size_t>(k)];
      vn += q;
      vo += q * model::eval_polynomial(H.potential_coeffs, u);
      v1 += q * u;
      v2 += q * u * u;
    }
  double tn = 0.0, to = 0.0, t1 = 0.0, t2 = 0.0;
  for (int k = 0; k < nx; ++k)
    for (int j = 0; j < np; ++j) {
      const double q = std::norm(b(k, j));
      const double u = grid.p(j) + 0.5 * hbar * lam[static_cast<std::size_t>(k)];
      tn += q;
      to += q * model::eval_polynomial(H.kinetic_coeffs, u);
      t1 += q * u;
      t2 += q * u * u;
    }

  ThermalObservables obs;
  obs.energy = vo / vn + to / tn;
  const double mx = v1 / vn, mp = t1 / tn;
  obs.dx = std::sqrt(std::max(0.0, v2 / vn - mx * mx));
  obs.dp = std::sqrt(std::max(0.0, t2 / tn - mp * mp));
  return obs;
}

}  // namespace waveop::oracle
