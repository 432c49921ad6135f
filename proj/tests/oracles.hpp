// Test-only numerical oracles, independent of the library's integrators.
#ifndef MEMORYPORT_TESTS_ORACLES_HPP
#define MEMORYPORT_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <complex>
#include <random>

namespace oracles {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

/// Matrix exponential by scaling and squaring of a plain Taylor series.
/// Deliberately naive and independent of Eigen's Pade implementation.
inline MatrixXcd expm_taylor(const MatrixXcd& A) {
  const int n = static_cast<int>(A.rows());
  double norm = A.cwiseAbs().sum();
  int squarings = 0;
  while (norm > 0.5) {
    norm *= 0.5;
    ++squarings;
  }
  MatrixXcd B = A / std::pow(2.0, squarings);
  MatrixXcd term = MatrixXcd::Identity(n, n);
  MatrixXcd sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = (term * B) / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-20) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// Generator of the homogeneous cavity/spin system for constant coupling.
inline MatrixXcd coupling_matrix(double C, const VectorXcd& k) {
  const int N = static_cast<int>(k.size());
  MatrixXcd M = MatrixXcd::Zero(N + 1, N + 1);
  M(0, 0) = -0.5 * C;
  for (int m = 0; m < N; ++m) {
    M(0, m + 1) = Complex{0.0, -1.0} * k[m];
    M(m + 1, 0) = Complex{0.0, -1.0} * std::conj(k[m]);
  }
  return M;
}

/// Smooth random complex coupling profile: a low-order Fourier series.
inline VectorXcd random_smooth_profile(std::mt19937& rng, int n_steps, double span,
                                       double amplitude) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXcd k = VectorXcd::Zero(n_steps);
  for (int h = 1; h <= 4; ++h) {
    Complex c{gauss(rng), gauss(rng)}, d{gauss(rng), gauss(rng)};
    for (int i = 0; i < n_steps; ++i) {
      double t = (i + 0.5) / static_cast<double>(n_steps) * span;
      double w = 2.0 * M_PI * h * t / span;
      k[i] += c * std::cos(w) + d * std::sin(w);
    }
  }
  return k * (amplitude / 3.0);
}

/// Haar-ish random unitary from the QR decomposition of a Ginibre matrix.
inline MatrixXcd random_unitary(std::mt19937& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = Complex{gauss(rng), gauss(rng)};
  Eigen::HouseholderQR<MatrixXcd> qr(g);
  MatrixXcd q = qr.householderQ();
  MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
  return q;
}

}  // namespace oracles

#endif  // MEMORYPORT_TESTS_ORACLES_HPP
