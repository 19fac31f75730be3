#include "nat2/twosample.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "nat2/errors.hpp"

namespace nat2 {

TwoSampleInput::TwoSampleInput(DataMatrix first, DataMatrix second)
    : x1(std::move(first)), x2(std::move(second)) {
  if (x1.p() != x2.p()) {
    throw input_error("TwoSampleInput: samples must share the same dimension p");
  }
}

Eigen::MatrixXd two_sample_transform_rows(const Eigen::MatrixXd& x1,
                                          const Eigen::MatrixXd& x2) {
  const Eigen::Index n1 = x1.rows();
  const Eigen::Index n2 = x2.rows();
  if (x1.cols() != x2.cols()) {
    throw input_error("two_sample_transform_rows: dimension mismatch");
  }
  if (n1 > n2) {
    throw input_error("two_sample_transform_rows: requires n1 <= n2");
  }
  const double dn1 = static_cast<double>(n1);
  const double dn2 = static_cast<double>(n2);
  const double scale = std::sqrt(dn1 / dn2);
  const Eigen::RowVectorXd shift =
      x2.topRows(n1).colwise().sum() / std::sqrt(dn1 * dn2) -
      x2.colwise().mean();
  Eigen::MatrixXd y = x1 - scale * x2.topRows(n1);
  y.rowwise() += shift;
  return y;
}

DataMatrix two_sample_transform(const TwoSampleInput& input) {
  const bool swap = input.x1.n() > input.x2.n();
  const Eigen::MatrixXd& a = swap ? input.x2.values() : input.x1.values();
  const Eigen::MatrixXd& b = swap ? input.x1.values() : input.x2.values();
  return DataMatrix(two_sample_transform_rows(a, b));
}

namespace {

bool needs_swap(const TwoSampleInput& input) {
  return input.x1.n() > input.x2.n();
}

// Exactly identical samples collapse the transform to the zero matrix, where
// the precision fit is undefined. The limiting outcome is reported instead:
// zero statistic, p-value one, no rejection.
std::optional<TestReport> degenerate_identity_report(const DataMatrix& y,
                                                     int k, double alpha) {
  if (!y.values().isZero(0.0)) return std::nullopt;
  TestReport report;
  report.statistic = 0.0;
  report.centering = static_cast<double>(y.p());
  report.sigma_hat = 0.0;
  report.z_score = std::numeric_limits<double>::lowest();
  report.p_value = 1.0;
  report.k = k;
  report.alpha = alpha;
  report.reject = false;
  report.n = y.n();
  report.p = y.p();
  return report;
}

}  // namespace

TestReport run_two_sample_test(const TwoSampleInput& input, int k, double alpha,
                               const RunOptions& opts) {
  const DataMatrix y = two_sample_transform(input);
  TestReport report;
  if (auto degenerate = degenerate_identity_report(y, k, alpha)) {
    report = *degenerate;
  } else {
    report = run_test(y, k, alpha, opts);
  }
  report.swapped_samples = needs_swap(input);
  return report;
}

TestReport run_two_sample_test_auto(const TwoSampleInput& input,
                                    const SelectionConfig& cfg, double alpha,
                                    const RunOptions& opts) {
  const DataMatrix y = two_sample_transform(input);
  TestReport report;
  if (auto degenerate = degenerate_identity_report(y, 0, alpha)) {
    report = *degenerate;
  } else {
    report = run_test_auto(y, cfg, alpha, opts);
  }
  report.swapped_samples = needs_swap(input);
  return report;
}

}  // namespace nat2
