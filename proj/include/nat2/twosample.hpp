#pragma once

#include "nat2/natest.hpp"

namespace nat2 {

/// Two independent samples over the same p variables. When n1 > n2 the
/// pipeline swaps them internally (the quadratic-form test is indifferent
/// to the sign of the mean difference); the report records the swap.
struct TwoSampleInput {
  TwoSampleInput(DataMatrix first, DataMatrix second);
  DataMatrix x1;
  DataMatrix x2;
};

/// Raw transform on row matrices, requiring rows(x1) <= rows(x2): returns
/// the n1 x p sample Y with
///   Y_i = X1_i - sqrt(n1/n2) X2_i + (n1 n2)^{-1/2} sum_{j<=n1} X2_j
///         - n2^{-1} sum_l X2_l,
/// whose mean is exactly xbar_1 - xbar_2. The first n1 members of the
/// second sample enter the third term in input order; shuffle beforehand
/// for a randomized pairing.
Eigen::MatrixXd two_sample_transform_rows(const Eigen::MatrixXd& x1,
                                          const Eigen::MatrixXd& x2);

/// Transform with the internal swap applied when needed.
DataMatrix two_sample_transform(const TwoSampleInput& input);

/// One-sample pipeline on the transformed sample at fixed band width.
/// Exactly identical samples make the transformed sample the zero matrix,
/// where no precision fit exists; that case reports the limiting outcome
/// directly (statistic 0, p-value 1, no rejection, sigma_hat 0).
TestReport run_two_sample_test(const TwoSampleInput& input, int k, double alpha,
                               const RunOptions& opts = {});

/// Auto-k variant: stability selection on the transformed sample.
TestReport run_two_sample_test_auto(const TwoSampleInput& input,
                                    const SelectionConfig& cfg, double alpha,
                                    const RunOptions& opts = {});

}  // namespace nat2
