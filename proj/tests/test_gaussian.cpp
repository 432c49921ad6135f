#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memoryport/gaussian.hpp>

#include "oracles.hpp"

using namespace memoryport;

namespace {
/// Analytic two-mode squeezed vacuum covariance (identity-vacuum convention).
MatrixXd tmsv_covariance(double r) {
  MatrixXd c = MatrixXd::Zero(4, 4);
  double ch = std::cosh(2.0 * r), sh = std::sinh(2.0 * r);
  c(0, 0) = c(1, 1) = c(2, 2) = c(3, 3) = ch;
  c(0, 2) = c(2, 0) = sh;  // p-squeezed, x-squeezed inputs through 50:50
  c(1, 3) = c(3, 1) = -sh;
  return c;
}

GaussianState bs_output(double r, double eta) {
  VectorXd rs(2), angles(2);
  rs << r, r;
  angles << M_PI / 2.0, 0.0;
  auto input = make_squeezed_inputs(rs, angles);
  MatrixXcd bs(2, 2);
  bs << 1, 1, 1, -1;
  bs *= std::sqrt(eta) / std::sqrt(2.0);
  return apply_channel(input, transfer_to_quadratures(bs));
}
}  // namespace

TEST_CASE("squeezed input states") {
  SUBCASE("r = 0 is vacuum") {
    auto s = make_squeezed_inputs(VectorXd::Zero(3), VectorXd::Zero(3));
    CHECK((s.covariance - MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("single mode, r = 1, angle 0") {
    VectorXd r(1), a(1);
    r << 1.0;
    a << 0.0;
    auto s = make_squeezed_inputs(r, a);
    CHECK(s.covariance(0, 0) == doctest::Approx(std::exp(-2.0)));
    CHECK(s.covariance(1, 1) == doctest::Approx(std::exp(2.0)));
  }
  SUBCASE("orthogonal angles swap the variances") {
    VectorXd r(2), a(2);
    r << 1.0, 1.0;
    a << 0.0, M_PI / 2.0;
    auto s = make_squeezed_inputs(r, a);
    CHECK(s.covariance(2, 2) == doctest::Approx(std::exp(2.0)));
    CHECK(s.covariance(3, 3) == doctest::Approx(std::exp(-2.0)));
    CHECK(std::abs(s.covariance(0, 2)) < 1e-12);
  }
  SUBCASE("purity: all symplectic eigenvalues are 1") {
    VectorXd r(2), a(2);
    r << 0.7, 1.3;
    a << 0.4, 2.1;
    auto nus = symplectic_eigenvalues(make_squeezed_inputs(r, a).covariance);
    CHECK((nus.array() - 1.0).abs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("quadrature channel construction") {
  SUBCASE("identity transfer is noiseless") {
    auto qc = transfer_to_quadratures(MatrixXcd::Identity(2, 2));
    CHECK((qc.S - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(qc.G.cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("uniform loss gives the beamsplitter noise") {
    auto qc = transfer_to_quadratures(std::sqrt(0.9) * MatrixXcd::Identity(2, 2));
    CHECK((qc.G - 0.1 * MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("zero transfer maps everything to vacuum") {
    VectorXd r(1), a(1);
    r << 1.5;
    a << 0.3;
    auto out = apply_channel(make_squeezed_inputs(r, a),
                             transfer_to_quadratures(MatrixXcd::Zero(1, 1)));
    CHECK((out.covariance - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("overunity transfer is rejected") {
    CHECK_THROWS_AS(transfer_to_quadratures(1.1 * MatrixXcd::Identity(2, 2)), NonPassive);
  }
  SUBCASE("complex entries become rotation-scaling blocks") {
    MatrixXcd m(1, 1);
    m << Complex{0.0, 0.8};
    auto qc = transfer_to_quadratures(m);
    CHECK(qc.S(0, 1) == doctest::Approx(-0.8));
    CHECK(qc.S(1, 0) == doctest::Approx(0.8));
  }
}

TEST_CASE("apply_channel") {
  SUBCASE("vacuum is a fixed point of any passive channel") {
    std::mt19937 rng(17);
    auto u = oracles::random_unitary(rng, 3);
    auto out = apply_channel(GaussianState::vacuum(3), transfer_to_quadratures(0.6 * u));
    CHECK((out.covariance - MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(out.mean.cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("orthogonally squeezed inputs through lossless 50:50 give TMSV") {
    auto out = bs_output(1.0, 1.0);
    CHECK((out.covariance - tmsv_covariance(1.0)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("50% loss on a squeezed mode: closed-form variances") {
    VectorXd r(1), a(1);
    r << 1.0;
    a << 0.0;
    auto out = apply_channel(make_squeezed_inputs(r, a),
                             transfer_to_quadratures(std::sqrt(0.5) * MatrixXcd::Identity(1, 1)));
    CHECK(out.covariance(0, 0) == doctest::Approx(0.5 * std::exp(-2.0) + 0.5));
    CHECK(out.covariance(1, 1) == doctest::Approx(0.5 * std::exp(2.0) + 0.5));
  }
  SUBCASE("physicality is preserved for random passive channels") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      VectorXd r(2), a(2);
      r << 2.0 * uni(rng), 2.0 * uni(rng);
      a << 2.0 * M_PI * uni(rng), 2.0 * M_PI * uni(rng);
      MatrixXcd t = std::sqrt(uni(rng)) * oracles::random_unitary(rng, 2);
      auto out = apply_channel(make_squeezed_inputs(r, a), transfer_to_quadratures(t));
      CHECK(symplectic_eigenvalues(out.covariance).minCoeff() >= 1.0 - 1e-9);
    }
  }
}

TEST_CASE("entanglement measures") {
  SUBCASE("vacuum is separable") {
    CHECK(log_negativity(GaussianState::vacuum(2)) < 1e-12);
    CHECK(duan_value(GaussianState::vacuum(2)) == doctest::Approx(4.0));
  }
  SUBCASE("lossless TMSV: E_N = 2r against the symplectic oracle") {
    auto out = bs_output(1.0, 1.0);
    CHECK(log_negativity(out) == doctest::Approx(2.0).epsilon(1e-6));
    // independent route: nu_min of the partially transposed analytic covariance
    CHECK(duan_value(out) == doctest::Approx(4.0 * std::exp(-2.0)).epsilon(1e-9));
  }
  SUBCASE("loss degrades but keeps entanglement, monotonically") {
    double prev = 0.0;
    for (double eta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      double en = log_negativity(bs_output(1.0, eta));
      CHECK(en > prev);
      CHECK(en < 2.0);
      prev = en;
    }
  }
  SUBCASE("Duan witness implies negativity") {
    for (double eta : {0.2, 0.5, 0.8, 1.0}) {
      auto out = bs_output(0.8, eta);
      if (duan_value(out) < 4.0) CHECK(log_negativity(out) > 0.0);
    }
  }
  SUBCASE("unsupported partitions are rejected") {
    CHECK_THROWS_AS(log_negativity(GaussianState::vacuum(3)), UnsupportedPartition);
    CHECK_THROWS_AS(duan_value(GaussianState::vacuum(1)), DimensionMismatch);
  }
}
