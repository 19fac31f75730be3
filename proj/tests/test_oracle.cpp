#include <doctest.h>

#include <cmath>

#include "nat2/covariance.hpp"
#include "nat2/errors.hpp"
#include "nat2/normal.hpp"
#include "nat2/oracle.hpp"
#include "test_util.hpp"

using namespace nat2;

namespace {

OracleSpec ar1_cluster_spec(double eta) {
  const Eigen::Index p = 200;
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
  mu.head(8).setConstant(0.2);
  return OracleSpec{materialize(Ar1{0.6}, p), mu, 60, eta, 0.05};
}

}  // namespace

TEST_CASE("oracle statistic special cases") {
  Rng rng(103);
  SUBCASE("identity covariance reduces to the scaled mean norm") {
    const Eigen::MatrixXd values = testutil::gaussian_matrix(rng, 10, 6);
    const DataMatrix x(values);
    const OracleSpec spec{SymmetricMatrix(Eigen::MatrixXd::Identity(6, 6)),
                          Eigen::VectorXd::Zero(6), 10, -0.7, 0.05};
    const double want = 10.0 * values.colwise().mean().squaredNorm();
    CHECK(oracle_statistic(x, spec) == doctest::Approx(want).epsilon(1e-12));
  }
  SUBCASE("eta zero never transforms the data") {
    const SymmetricMatrix sigma = testutil::random_spd(rng, 5);
    const DataMatrix x(testutil::gaussian_matrix(rng, 8, 5));
    const OracleSpec spec{sigma, Eigen::VectorXd::Zero(5), 8, 0.0, 0.05};
    const double want = 8.0 * x.column_means().squaredNorm();
    CHECK(oracle_statistic(x, spec) == doctest::Approx(want).epsilon(1e-9));
  }
  SUBCASE("eta -1/2 agrees with a direct linear solve") {
    const SymmetricMatrix sigma = testutil::random_spd(rng, 7);
    const DataMatrix x(testutil::gaussian_matrix(rng, 9, 7));
    const OracleSpec spec{sigma, Eigen::VectorXd::Zero(7), 9, -0.5, 0.05};
    const Eigen::VectorXd xbar = x.column_means();
    const double want = 9.0 * xbar.dot(sigma.values().llt().solve(xbar));
    CHECK(testutil::relative_error(oracle_statistic(x, spec), want) < 1e-9);
  }
}

TEST_CASE("oracle snr reproduces the clustered ar1 values") {
  CHECK(std::abs(oracle_snr(ar1_cluster_spec(-1.0)) - 0.1448) < 5e-4);
  CHECK(std::abs(oracle_snr(ar1_cluster_spec(-0.5)) - 0.3826) < 5e-4);
  CHECK(std::abs(oracle_snr(ar1_cluster_spec(0.0)) - 0.5835) < 5e-4);
}

TEST_CASE("oracle snr basics") {
  Rng rng(107);
  SUBCASE("null mean gives zero") {
    OracleSpec spec = ar1_cluster_spec(-0.5);
    spec.mu.setZero();
    CHECK(oracle_snr(spec) == 0.0);
  }
  SUBCASE("identity covariance is eta-free") {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(30);
    mu.head(5).setConstant(0.3);
    const SymmetricMatrix id(Eigen::MatrixXd::Identity(30, 30));
    const double want = 20.0 * mu.squaredNorm() /
                        std::sqrt(2.0 * 30.0 + 4.0 * 20.0 * mu.squaredNorm());
    for (double eta : {-1.0, -0.5, 0.0, 0.8}) {
      const OracleSpec spec{id, mu, 20, eta, 0.05};
      CHECK(oracle_snr(spec) == doctest::Approx(want).epsilon(1e-12));
    }
  }
  SUBCASE("scaling the mean strictly increases the snr") {
    const SymmetricMatrix sigma = testutil::random_spd(rng, 12);
    Eigen::VectorXd mu(12);
    for (Eigen::Index i = 0; i < 12; ++i) mu(i) = rng.normal();
    double previous = 0.0;
    for (double c : {0.5, 1.0, 2.0, 4.0}) {
      const OracleSpec spec{sigma, c * mu, 15, -0.5, 0.05};
      const double snr = oracle_snr(spec);
      CHECK(snr > previous);
      previous = snr;
    }
  }
}

TEST_CASE("oracle power properties") {
  SUBCASE("size is exact under the null mean") {
    Rng rng(109);
    const SymmetricMatrix sigma = testutil::random_spd(rng, 9);
    for (double eta : {-1.0, -0.5, 0.0}) {
      for (double alpha : {0.01, 0.05, 0.2}) {
        const OracleSpec spec{sigma, Eigen::VectorXd::Zero(9), 40, eta, alpha};
        CHECK(std::abs(oracle_power(spec) - alpha) < 1e-12);
      }
    }
  }
  SUBCASE("power increases along a scaled mean") {
    OracleSpec spec = ar1_cluster_spec(-0.5);
    double previous = 0.0;
    for (double c : {0.0, 0.5, 1.0, 2.0, 4.0}) {
      OracleSpec scaled = spec;
      scaled.mu = c * spec.mu;
      const double beta = oracle_power(scaled);
      CHECK(beta >= previous);
      previous = beta;
    }
  }
  SUBCASE("clustered ar1 design orders the three etas by snr") {
    const double b0 = oracle_power(ar1_cluster_spec(0.0));
    const double b_half = oracle_power(ar1_cluster_spec(-0.5));
    const double b1 = oracle_power(ar1_cluster_spec(-1.0));
    CHECK(b0 > b_half);
    CHECK(b_half > b1);
  }
}

TEST_CASE("spectral summary") {
  SUBCASE("identity covariance is fully degenerate") {
    const SymmetricMatrix id(Eigen::MatrixXd::Identity(6, 6));
    const SpectralSummary ss = spectral_summary(id);
    CHECK(ss.lambda_bar_sq == doctest::Approx(1.0));
    CHECK(ss.lambda_tilde_sq == doctest::Approx(1.0));
    CHECK(ss.m1 == 6);
    CHECK(ss.m2 == 1);
  }
  SUBCASE("two-point spectrum arithmetic") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 4.0;
    const SpectralSummary ss = spectral_summary(SymmetricMatrix(d));
    CHECK(ss.lambda_bar_sq == doctest::Approx(8.5));
    CHECK(ss.lambda_tilde_sq == doctest::Approx(0.53125));
  }
  SUBCASE("eigen-pairs reconstruct the matrix") {
    Rng rng(113);
    const SymmetricMatrix sigma = testutil::random_spd(rng, 8);
    const SpectralSummary ss = spectral_summary(sigma);
    const Eigen::MatrixXd rebuilt = ss.eigenvectors *
                                    ss.eigenvalues.asDiagonal() *
                                    ss.eigenvectors.transpose();
    CHECK((rebuilt - sigma.values()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("proposition 3 orderings for constructed eigen-block means") {
  const SymmetricMatrix sigma = materialize(Ar1{0.6}, 100);
  const SpectralSummary ss = spectral_summary(sigma);
  REQUIRE(ss.m1 >= 2);
  REQUIRE(ss.m2 <= 99);

  SUBCASE("bottom block prefers stronger inverse transforms") {
    const Eigen::VectorXd mu = 0.05 * (ss.eigenvectors.col(0) +
                                       0.5 * ss.eigenvectors.col(1));
    const Prop3Report report =
        proposition3_check(sigma, mu, 60, 0.05, EigenBlock::bottom);
    CHECK(report.local_condition_ok);
    CHECK(report.ordering_holds);
    CHECK(report.beta[0] >= report.beta[1]);
    CHECK(report.beta[1] >= report.beta[2]);
  }
  SUBCASE("top block reverses the ordering") {
    const Eigen::VectorXd mu = 0.05 * ss.eigenvectors.col(99);
    const Prop3Report report =
        proposition3_check(sigma, mu, 60, 0.05, EigenBlock::top);
    CHECK(report.local_condition_ok);
    CHECK(report.ordering_holds);
    CHECK(report.beta[0] <= report.beta[1]);
    CHECK(report.beta[1] <= report.beta[2]);
  }
  SUBCASE("null mean orders trivially") {
    const Prop3Report report = proposition3_check(
        sigma, Eigen::VectorXd::Zero(100), 60, 0.05, EigenBlock::bottom);
    CHECK(report.ordering_holds);
    for (double beta : report.beta) CHECK(beta == doctest::Approx(0.05));
  }
  SUBCASE("mean outside the block is a precondition error") {
    const Eigen::VectorXd mu = 0.05 * ss.eigenvectors.col(99);
    CHECK_THROWS_AS(proposition3_check(sigma, mu, 60, 0.05, EigenBlock::bottom),
                    input_error);
  }
}

TEST_CASE("equal-spectrum power is invariant in eta") {
  // with all eigenvalues equal the transform only rescales the statistic,
  // so the power formula is eta-free for a fixed mean
  const Eigen::Index p = 40;
  const SymmetricMatrix sigma(Eigen::MatrixXd::Identity(p, p) * 1.7);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
  mu.head(4).setConstant(0.25);
  const double b0 = oracle_power(OracleSpec{sigma, mu, 30, 0.0, 0.05});
  for (double eta : {-1.0, -0.5, 0.5}) {
    const OracleSpec spec{sigma, mu, 30, eta, 0.05};
    CHECK(oracle_power(spec) == doctest::Approx(b0).epsilon(1e-10));
  }
}
