#ifndef MEMORYPORT_GAUSSIAN_HPP
#define MEMORYPORT_GAUSSIAN_HPP

#include <Eigen/Eigenvalues>

#include "memoryport/channel.hpp"

namespace memoryport {

// Quadrature convention: x = a + a^dag, p = -i (a - a^dag); vacuum covariance
// is the identity. Quadratures are ordered x_1, p_1, ..., x_N, p_N.

struct GaussianState {
  VectorXd mean;
  MatrixXd covariance;

  GaussianState(VectorXd m, MatrixXd c) : mean(std::move(m)), covariance(std::move(c)) {
    if (covariance.rows() != covariance.cols() || covariance.rows() != mean.size() ||
        mean.size() % 2 != 0)
      throw DimensionMismatch("GaussianState: need 2N quadratures");
    if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw NonFiniteInput("GaussianState: covariance not symmetric");
  }

  static GaussianState vacuum(int n_modes) {
    return GaussianState(VectorXd::Zero(2 * n_modes), MatrixXd::Identity(2 * n_modes, 2 * n_modes));
  }

  int n_modes() const { return static_cast<int>(mean.size()) / 2; }
};

/// Symplectic form Omega = direct sum of [[0, 1], [-1, 0]].
inline MatrixXd symplectic_form(int n_modes) {
  MatrixXd omega = MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int i = 0; i < n_modes; ++i) {
    omega(2 * i, 2 * i + 1) = 1.0;
    omega(2 * i + 1, 2 * i) = -1.0;
  }
  return omega;
}

/// Symplectic eigenvalues of a covariance matrix, ascending. These are the
/// |imaginary parts| of the eigenvalues of Omega * C, which come in +/- pairs.
inline VectorXd symplectic_eigenvalues(const MatrixXd& cov) {
  const int n = static_cast<int>(cov.rows()) / 2;
  Eigen::ComplexEigenSolver<MatrixXcd> solver((symplectic_form(n) * cov).cast<Complex>());
  std::vector<double> nus;
  for (int i = 0; i < 2 * n; ++i) nus.push_back(std::abs(solver.eigenvalues()[i].imag()));
  std::sort(nus.begin(), nus.end());
  VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = nus[2 * i];  // pairs are adjacent once sorted
  return out;
}

/// Product state of single-mode squeezed vacua: variance e^{-2r} along the
/// quadrature at `angle`, e^{+2r} orthogonal.
inline GaussianState make_squeezed_inputs(const VectorXd& r, const VectorXd& angle) {
  if (r.size() != angle.size()) throw DimensionMismatch("make_squeezed_inputs: length mismatch");
  const int n = static_cast<int>(r.size());
  MatrixXd cov = MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    if (r[i] < 0.0) throw NonFiniteInput("make_squeezed_inputs: r must be >= 0");
    double c = std::cos(angle[i]), s = std::sin(angle[i]);
    Eigen::Matrix2d rot;
    rot << c, -s, s, c;
    Eigen::Matrix2d block =
        rot * Eigen::Vector2d(std::exp(-2.0 * r[i]), std::exp(2.0 * r[i])).asDiagonal() *
        rot.transpose();
    cov.block<2, 2>(2 * i, 2 * i) = block;
  }
  return GaussianState(VectorXd::Zero(2 * n), cov);
}

/// Quadrature representation of a passive channel: S from the complex transfer
/// matrix (each entry becomes a 2x2 rotation-scaling block), G = I - S S^T.
struct QuadratureChannel {
  MatrixXd S;
  MatrixXd G;
};

inline QuadratureChannel transfer_to_quadratures(const MatrixXcd& transfer) {
  const int n = static_cast<int>(transfer.rows());
  if (transfer.cols() != n) throw DimensionMismatch("transfer_to_quadratures: square matrix");
  QuadratureChannel qc;
  qc.S = MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double re = transfer(i, j).real(), im = transfer(i, j).imag();
      qc.S(2 * i, 2 * j) = re;
      qc.S(2 * i, 2 * j + 1) = -im;
      qc.S(2 * i + 1, 2 * j) = im;
      qc.S(2 * i + 1, 2 * j + 1) = re;
    }
  qc.G = MatrixXd::Identity(2 * n, 2 * n) - qc.S * qc.S.transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(qc.G);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw NonPassive("transfer_to_quadratures: transfer has singular value > 1");
  return qc;
}

inline QuadratureChannel channel_to_quadratures(const ChannelMatrix& channel) {
  return transfer_to_quadratures(channel.transfer);
}

inline GaussianState apply_channel(const GaussianState& state, const QuadratureChannel& qc) {
  if (qc.S.rows() != state.mean.size()) throw DimensionMismatch("apply_channel: dimensions");
  MatrixXd cov = qc.S * state.covariance * qc.S.transpose() + qc.G;
  cov = 0.5 * (cov + cov.transpose()).eval();
  return GaussianState(qc.S * state.mean, cov);
}

/// Log-negativity (nats) of a two-mode state across the 1|1 split.
inline double log_negativity(const GaussianState& state, int partition_split = 1) {
  if (state.n_modes() != 2 || partition_split != 1)
    throw UnsupportedPartition("log_negativity: only the two-mode 1|1 split is supported");
  VectorXd flip = VectorXd::Ones(4);
  flip[3] = -1.0;  // partial transpose: p_2 -> -p_2
  MatrixXd cov_pt = flip.asDiagonal() * state.covariance * flip.asDiagonal();
  double nu_min = symplectic_eigenvalues(cov_pt).minCoeff();
  return std::max(0.0, -std::log(nu_min));
}

/// Duan witness Var(x1 - x2) + Var(p1 + p2); values < 4 certify entanglement
/// in the identity-vacuum convention.
inline double duan_value(const GaussianState& state) {
  if (state.n_modes() != 2) throw DimensionMismatch("duan_value: need exactly two modes");
  const MatrixXd& c = state.covariance;
  return c(0, 0) + c(2, 2) - 2.0 * c(0, 2) + c(1, 1) + c(3, 3) + 2.0 * c(1, 3);
}

}  // namespace memoryport

#endif  // MEMORYPORT_GAUSSIAN_HPP
