#ifndef MEMORYPORT_SPATIAL_HPP
#define MEMORYPORT_SPATIAL_HPP

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <functional>

#include "memoryport/core.hpp"

namespace memoryport {

// Longitudinal overlap diagnostics for the spin-wave basis. Each wave m
// carries a phase factor exp(i dk_m z); the Gram matrix of the profiles
// weighted by the atomic density n(z) is
//
//   G[n][m] = int n(z) exp(i (dk_n - dk_m) z) dz.
//
// Transverse factors are common to all waves and cancel.

struct DensityProfile {
  enum class Kind { Uniform, Gaussian };
  Kind kind;
  double length_L;       // uniform: support [-L/2, L/2]
  double sigma_z;        // gaussian std deviation
  double truncation_sigmas = 8.0;

  static DensityProfile uniform(double L) {
    if (!(L > 0.0)) throw NonFiniteInput("DensityProfile: L must be positive");
    return DensityProfile{Kind::Uniform, L, 0.0};
  }
  static DensityProfile gaussian(double sigma, double truncation_sigmas = 8.0) {
    if (!(sigma > 0.0)) throw NonFiniteInput("DensityProfile: sigma must be positive");
    return DensityProfile{Kind::Gaussian, 0.0, sigma, truncation_sigmas};
  }

  double lower() const { return kind == Kind::Uniform ? -0.5 * length_L : -truncation_sigmas * sigma_z; }
  double upper() const { return -lower(); }

  /// Unnormalized density; gram_matrix divides by the integrated mass so the
  /// diagonal is exactly 1 on the truncated support.
  double density(double z) const {
    if (kind == Kind::Uniform) return 1.0 / length_L;
    double u = z / sigma_z;
    return std::exp(-0.5 * u * u) / (sigma_z * std::sqrt(2.0 * M_PI));
  }
};

struct SpinWaveBasis {
  std::vector<double> kz_offsets;  // dk_m = k_z^(m) - k_c

  explicit SpinWaveBasis(std::vector<double> offsets) : kz_offsets(std::move(offsets)) {
    for (std::size_t i = 0; i < kz_offsets.size(); ++i)
      for (std::size_t j = i + 1; j < kz_offsets.size(); ++j)
        if (kz_offsets[i] == kz_offsets[j])
          throw DimensionMismatch("SpinWaveBasis: offsets must be distinct");
  }

  int size() const { return static_cast<int>(kz_offsets.size()); }
};

namespace detail {

inline double quad(const std::function<double(double)>& f, double a, double b) {
  double error = 0.0;
  double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 12, 1e-12, &error);
  if (error > 1e-10) throw QuadratureFailure("gram_matrix: quadrature tolerance unattainable");
  return value;
}

}  // namespace detail

inline MatrixXcd gram_matrix(const DensityProfile& profile, const SpinWaveBasis& basis) {
  const int N = basis.size();
  const double a = profile.lower(), b = profile.upper();
  const double mass = detail::quad([&](double z) { return profile.density(z); }, a, b);

  MatrixXcd G = MatrixXcd::Identity(N, N);
  for (int n = 0; n < N; ++n)
    for (int m = n + 1; m < N; ++m) {
      double dk = basis.kz_offsets[n] - basis.kz_offsets[m];
      double re = detail::quad(
          [&](double z) { return profile.density(z) * std::cos(dk * z); }, a, b);
      double im = detail::quad(
          [&](double z) { return profile.density(z) * std::sin(dk * z); }, a, b);
      G(n, m) = Complex{re, im} / mass;
      G(m, n) = std::conj(G(n, m));
    }
  return G;
}

/// Worst off-diagonal overlap magnitude; 0 for perfectly addressable waves.
inline double crosstalk_metric(const MatrixXcd& G) {
  const int N = static_cast<int>(G.rows());
  if (G.cols() != N) throw DimensionMismatch("crosstalk_metric: square matrix expected");
  if ((G - G.adjoint()).cwiseAbs().maxCoeff() > 1e-9 ||
      (G.diagonal().array() - 1.0).abs().maxCoeff() > 1e-9)
    throw NonFiniteInput("crosstalk_metric: expected Hermitian unit-diagonal Gram matrix");
  double worst = 0.0;
  for (int n = 0; n < N; ++n)
    for (int m = 0; m < N; ++m)
      if (n != m) worst = std::max(worst, std::abs(G(n, m)));
  return worst;
}

}  // namespace memoryport

#endif  // MEMORYPORT_SPATIAL_HPP
