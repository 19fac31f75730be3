#include <doctest.h>

#include <cmath>
#include <vector>

#include "nat2/covariance.hpp"
#include "nat2/errors.hpp"
#include "nat2/natest.hpp"
#include "nat2/normal.hpp"
#include "nat2/simgen.hpp"
#include "test_util.hpp"

using namespace nat2;

namespace {

// Literal evaluation of the three distinct-index sums, O(n^4).
double brute_force_variance(const Eigen::MatrixXd& gram) {
  const Eigen::Index n = gram.rows();
  double pairs = 0.0;
  double triples = 0.0;
  double quads = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      pairs += gram(i, j) * gram(i, j);
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        triples += gram(i, j) * gram(j, k);
        for (Eigen::Index l = 0; l < n; ++l) {
          if (l == i || l == j || l == k) continue;
          quads += gram(i, j) * gram(k, l);
        }
      }
    }
  }
  const double dn = static_cast<double>(n);
  return 2.0 * pairs / (dn * (dn - 1.0)) -
         4.0 * triples / (dn * (dn - 1.0) * (dn - 2.0)) +
         2.0 * quads / (dn * (dn - 1.0) * (dn - 2.0) * (dn - 3.0));
}

}  // namespace

TEST_CASE("scalar statistic cases") {
  SUBCASE("two equal scalar observations") {
    Eigen::MatrixXd x(2, 1);
    x << 1, 1;
    const DataMatrix data(x);
    const BandedPrecision bp = estimate_banded_precision(data, 0);
    CHECK(na_statistic(data, bp) == doctest::Approx(2.0));
  }
  SUBCASE("antithetic scalar observations have zero statistic") {
    Eigen::MatrixXd x(2, 1);
    x << 1, -1;
    const DataMatrix data(x);
    const BandedPrecision bp = estimate_banded_precision(data, 0);
    CHECK(na_statistic(data, bp) == doctest::Approx(0.0));
  }
}

TEST_CASE("regression form at k=0 is the standardized marginal sum") {
  Rng rng(31);
  const DataMatrix x(testutil::gaussian_matrix(rng, 9, 5));
  const RegressionFormResult reg = na_statistic_regression_form(x, 0);
  const double n = static_cast<double>(x.n());
  double want = 0.0;
  for (Eigen::Index l = 0; l < x.p(); ++l) {
    const double mean = x.values().col(l).mean();
    const double second_moment = x.values().col(l).squaredNorm() / n;
    want += n * mean * mean / second_moment;
    CHECK(reg.f_values(l) == doctest::Approx(n));
  }
  CHECK(reg.statistic == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("quadratic form and regression form agree") {
  Rng rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 8 + static_cast<Eigen::Index>(rng.uniform_int(13));
    const Eigen::Index p = 3 + static_cast<Eigen::Index>(rng.uniform_int(10));
    const int k = static_cast<int>(rng.uniform_int(4));
    if (n <= k + 2) continue;
    const DataMatrix x(testutil::gaussian_matrix(rng, n, p));
    const BandedPrecision bp = estimate_banded_precision(x, k);
    const double quadratic = na_statistic(x, bp);
    const RegressionFormResult reg = na_statistic_regression_form(x, k);
    CHECK(testutil::relative_error(reg.statistic, quadratic) < 1e-9);
    CHECK(quadratic >= 0.0);
    for (Eigen::Index l = 0; l < p; ++l) {
      CHECK(reg.per_column(l) >= 0.0);
      CHECK(reg.per_column(l) <= reg.f_values(l) + 1e-9);
    }
  }
}

TEST_CASE("regression form rejects a collinear column") {
  Rng rng(41);
  Eigen::MatrixXd x = testutil::gaussian_matrix(rng, 8, 3);
  x.col(2) = x.col(1);
  CHECK_THROWS_AS(na_statistic_regression_form(DataMatrix(x), 1),
                  numerical_error);
}

TEST_CASE("statistic is invariant to positive column rescaling") {
  Rng rng(43);
  const Eigen::MatrixXd base = testutil::gaussian_matrix(rng, 12, 6);
  const BandedPrecision bp = estimate_banded_precision(DataMatrix(base), 2);
  const double reference = na_statistic(DataMatrix(base), bp);
  Eigen::MatrixXd scaled = base;
  for (Eigen::Index l = 0; l < scaled.cols(); ++l) {
    scaled.col(l) *= 0.1 + 3.0 * rng.uniform();
  }
  const BandedPrecision bp_scaled =
      estimate_banded_precision(DataMatrix(scaled), 2);
  const double rescaled = na_statistic(DataMatrix(scaled), bp_scaled);
  CHECK(testutil::relative_error(rescaled, reference) < 1e-9);
}

TEST_CASE("variance estimator degenerate cancellation") {
  // identical rows: the Gram is constant, the three U-sums cancel exactly
  Eigen::MatrixXd gram = Eigen::MatrixXd::Constant(5, 5, 3.7);
  CHECK(variance_estimator_from_gram(gram) == doctest::Approx(0.0));
}

TEST_CASE("variance estimator matches the literal nested loops") {
  Rng rng(47);
  SUBCASE("seeded 6x3 draw") {
    const DataMatrix x(testutil::gaussian_matrix(rng, 6, 3));
    const BandedPrecision bp = estimate_banded_precision(x, 1);
    const Eigen::MatrixXd gram = precision_gram(x, bp);
    CHECK(std::abs(variance_estimator(x, bp) - brute_force_variance(gram)) <
          1e-10);
  }
  SUBCASE("50 random instances with n in 4..8") {
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::Index n = 4 + static_cast<Eigen::Index>(rng.uniform_int(5));
      const Eigen::Index p = 2 + static_cast<Eigen::Index>(rng.uniform_int(5));
      const int k = static_cast<int>(rng.uniform_int(3));
      if (k > n - 2) continue;
      const DataMatrix x(testutil::gaussian_matrix(rng, n, p));
      const BandedPrecision bp = estimate_banded_precision(x, k);
      const Eigen::MatrixXd gram = precision_gram(x, bp);
      const double fast = variance_estimator_from_gram(gram);
      const double slow = brute_force_variance(gram);
      CHECK(std::abs(fast - slow) < 1e-10 * std::max(1.0, std::abs(slow)));
    }
  }
  SUBCASE("n below 4 is rejected") {
    const DataMatrix x(testutil::gaussian_matrix(rng, 3, 2));
    const BandedPrecision bp = estimate_banded_precision(x, 0);
    CHECK_THROWS_AS(variance_estimator(x, bp), input_error);
  }
}

TEST_CASE("population variance closed forms") {
  SUBCASE("identity covariance") {
    const SymmetricMatrix id(Eigen::MatrixXd::Identity(7, 7));
    const PopulationBandedPrecision pop = population_banded_precision(id, 2);
    const PopulationVariance v =
        population_variance(id, pop, Eigen::VectorXd::Zero(7), 60);
    CHECK(v.sigma_n0_sq == doctest::Approx(14.0));
    CHECK(v.sigma_n_sq == doctest::Approx(14.0));
  }
  SUBCASE("ar1 with k=1 hits the exact band") {
    const SymmetricMatrix sigma = materialize(Ar1{0.6}, 3);
    const PopulationBandedPrecision pop = population_banded_precision(sigma, 1);
    const PopulationVariance v =
        population_variance(sigma, pop, Eigen::VectorXd::Zero(3), 60);
    CHECK(v.sigma_n0_sq == doctest::Approx(6.0).epsilon(1e-10));
    CHECK(v.sigma_n_sq == doctest::Approx(6.0).epsilon(1e-10));
  }
  SUBCASE("null mean always equalizes the two variances") {
    Rng rng(53);
    const SymmetricMatrix sigma = testutil::random_spd(rng, 6);
    const PopulationBandedPrecision pop = population_banded_precision(sigma, 2);
    const PopulationVariance v =
        population_variance(sigma, pop, Eigen::VectorXd::Zero(6), 25);
    CHECK(v.sigma_n_sq == doctest::Approx(v.sigma_n0_sq));
  }
}

TEST_CASE("run_test report fields and guards") {
  Rng rng(59);
  const DataMatrix x(testutil::gaussian_matrix(rng, 40, 15));
  const TestReport report = run_test(x, 3, 0.05);
  CHECK(report.centering == 15.0);
  CHECK(report.sigma_hat > 0.0);
  CHECK(report.p_value >= 0.0);
  CHECK(report.p_value <= 1.0);
  CHECK(report.k == 3);
  CHECK(report.n == 40);
  const bool by_z = report.z_score >= normal_upper_quantile(0.05);
  const bool by_p = report.p_value <= 0.05;
  CHECK(report.reject == by_z);
  CHECK(report.reject == by_p);

  CHECK_THROWS_AS(run_test(x, 5, 0.05), input_error);  // k > n/10
  CHECK_NOTHROW(run_test(x, 5, 0.05, RunOptions{.force_k = true}));
  CHECK_THROWS_AS(run_test(x, 3, 0.0), input_error);
  CHECK_THROWS_AS(run_test(x, 3, 1.0), input_error);
}

TEST_CASE("z score of zero maps to p-value one half") {
  CHECK(normal_upper_tail(0.0) == doctest::Approx(0.5));
}

TEST_CASE("variance estimator is ratio-consistent at desk scale" *
          doctest::skip(false)) {
  // mean over 200 null replicates of sigma-hat^2 / (2 tr{(Sigma_1^{-1} Sigma)^2})
  const Eigen::Index n = 60;
  const Eigen::Index p = 200;
  const SymmetricMatrix sigma = materialize(Ar1{0.6}, p);
  const PopulationBandedPrecision pop = population_banded_precision(sigma, 1);
  const double target =
      population_variance(sigma, pop, Eigen::VectorXd::Zero(p), n).sigma_n0_sq;

  ScenarioConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.model = Ar1{0.6};
  cfg.seed = 2024;
  const ScenarioSampler sampler(cfg);
  double ratio_sum = 0.0;
  const int reps = 200;
  for (int rep = 0; rep < reps; ++rep) {
    const DataMatrix x = sampler.sample(rep);
    const BandedPrecision bp = estimate_banded_precision(x, 1);
    ratio_sum += variance_estimator(x, bp) / target;
  }
  const double mean_ratio = ratio_sum / reps;
  CHECK(mean_ratio > 0.85);
  CHECK(mean_ratio < 1.15);
}
