#include "waveop/oscillator.hpp"

#include <cmath>
#include <stdexcept>

namespace waveop::oscillator {

Eigen::MatrixXcd annihilation(int N) {
  if (N < 2) throw std::invalid_argument("annihilation: N must be >= 2");
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(N, N);
  for (int n = 1; n < N; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Eigen::MatrixXd wavefunctions(int N, const Eigen::VectorXd& x, double hbar) {
  if (N < 1) throw std::invalid_argument("wavefunctions: N must be >= 1");
  if (!(hbar > 0.0)) throw std::invalid_argument("wavefunctions: hbar must be positive");
  const auto nx = x.size();
  Eigen::MatrixXd phi(nx, N);
  const double norm0 = std::pow(M_PI * hbar, -0.25);
  for (Eigen::Index i = 0; i < nx; ++i) {
    const double u = x(i) / std::sqrt(hbar);
    phi(i, 0) = norm0 * std::exp(-0.5 * u * u);
    if (N > 1) phi(i, 1) = std::sqrt(2.0) * u * phi(i, 0);
    // phi_{n+1} = sqrt(2/(n+1)) u phi_n - sqrt(n/(n+1)) phi_{n-1}
    for (int n = 1; n + 1 < N; ++n) {
      phi(i, n + 1) = std::sqrt(2.0 / (n + 1.0)) * u * phi(i, n) -
                      std::sqrt(n / (n + 1.0)) * phi(i, n - 1);
    }
  }
  return phi;
}

Eigen::VectorXcd coherent_vector(int N, double x0, double p0, double hbar) {
  if (N < 1) throw std::invalid_argument("coherent_vector: N must be >= 1");
  const std::complex<double> alpha(x0 / std::sqrt(2.0 * hbar),
                                   p0 / std::sqrt(2.0 * hbar));
  Eigen::VectorXcd c(N);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < N; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return c;
}

}  // namespace waveop::oscillator
