#pragma once

#include <optional>

#include "nat2/ksel.hpp"
#include "nat2/matrix.hpp"
#include "nat2/precision.hpp"

namespace nat2 {

/// Outcome of one Neighborhood-Assisted T^2 test. The normal calibration
/// rejects when z_score >= z_alpha, equivalently p_value <= alpha; the
/// p-value is the one-sided upper tail of N(0, 1).
struct TestReport {
  double statistic = 0.0;
  double centering = 0.0;   // p, the null centering of the statistic
  double sigma_hat = 0.0;   // estimated null standard deviation
  double z_score = 0.0;
  double p_value = 1.0;
  int k = 0;
  double alpha = 0.05;
  bool reject = false;
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  bool swapped_samples = false;               // two-sample runs only
  std::optional<SelectionResult> selection;   // present under auto-k
};

struct RunOptions {
  bool force_k = false;  // lift the k <= n/10 guard
};

/// Quadratic-form statistic n xbar' Sigma_k^{-1} xbar, evaluated through
/// the banded factors.
double na_statistic(const DataMatrix& x, const BandedPrecision& bp);

struct RegressionFormResult {
  double statistic = 0.0;
  Eigen::VectorXd per_column;  // T^2_{N,l}, each in [0, F_l]
  Eigen::VectorXd f_values;    // F_l = 1'(I - H_l)1
};

/// Independent regression-form evaluation of the statistic: per column,
/// an intercept-plus-predecessors least-squares fit combined with the
/// no-intercept predecessor projection of the all-ones vector. Agrees with
/// na_statistic as an algebraic identity; kept as a separate computation
/// path so the two can cross-check each other.
RegressionFormResult na_statistic_regression_form(const DataMatrix& x, int k);

/// U-statistic estimate of the null variance sigma^2_{N,0}(k), reduced to
/// O(n^2) sums over the Gram matrix of X_i' Sigma_k^{-1} X_j.
double variance_estimator(const DataMatrix& x, const BandedPrecision& bp);

/// Same estimator evaluated from a precomputed Gram matrix.
double variance_estimator_from_gram(const Eigen::MatrixXd& gram);

/// Full one-sample pipeline at a fixed band width. Guards k <= n/10 unless
/// opts.force_k is set.
TestReport run_test(const DataMatrix& x, int k, double alpha,
                    const RunOptions& opts = {});

/// Stability selection followed by run_test at the chosen k; the selection
/// diagnostics are attached to the report.
TestReport run_test_auto(const DataMatrix& x, const SelectionConfig& cfg,
                         double alpha, const RunOptions& opts = {});

struct PopulationVariance {
  double sigma_n0_sq = 0.0;  // 2 tr{(Sigma_k^{-1} Sigma)^2}
  double sigma_n_sq = 0.0;   // adds the 4n mu' Sigma_k^{-1} Sigma Sigma_k^{-1} mu term
};

/// Theoretical null and alternative variances for a known covariance,
/// population factor pair and mean vector.
PopulationVariance population_variance(const SymmetricMatrix& sigma,
                                       const PopulationBandedPrecision& pop,
                                       const Eigen::VectorXd& mu,
                                       Eigen::Index n);

}  // namespace nat2
