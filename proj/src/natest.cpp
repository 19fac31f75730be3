#include "nat2/natest.hpp"

#include <cmath>
#include <string>

#include "nat2/errors.hpp"
#include "nat2/normal.hpp"
#include "nat2/parallel.hpp"

namespace nat2 {

double na_statistic(const DataMatrix& x, const BandedPrecision& bp) {
  if (x.p() != bp.p) {
    throw input_error("na_statistic: dimension mismatch");
  }
  const DataMatrix z = apply_transform(x, bp);
  const Eigen::VectorXd zbar = z.column_means();
  return static_cast<double>(x.n()) * zbar.cwiseQuotient(bp.d2.cwiseSqrt()).squaredNorm();
}

RegressionFormResult na_statistic_regression_form(const DataMatrix& x, int k) {
  const Eigen::Index n = x.n();
  const Eigen::Index p = x.p();
  if (k < 0) {
    throw input_error("na_statistic_regression_form: k must be >= 0");
  }
  if (n <= k + 2) {
    throw input_error("na_statistic_regression_form: need n > k + 2");
  }
  const Eigen::MatrixXd& values = x.values();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);

  RegressionFormResult result;
  result.per_column.resize(p);
  result.f_values.resize(p);

  std::vector<std::string> failures(static_cast<std::size_t>(p));
  parallel_for(p, [&](std::int64_t l) {
    const Eigen::Index len = std::min<Eigen::Index>(k, l);
    const Eigen::VectorXd col = values.col(l);

    // F_l = 1'(I - H_l)1 with H_l the projection onto the raw predecessors
    double f_l = static_cast<double>(n);
    if (len > 0) {
      const auto pred = values.middleCols(l - len, len);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(pred);
      if (qr.rank() < len) {
        failures[static_cast<std::size_t>(l)] =
            "na_statistic_regression_form: collinear predecessors for column " +
            std::to_string(l);
        return;
      }
      f_l -= ones.dot(pred * qr.solve(ones));
    }

    // intercept-plus-predecessors fit of the column (Eq.-style regression)
    Eigen::MatrixXd design(n, len + 1);
    design.col(0) = ones;
    if (len > 0) design.rightCols(len) = values.middleCols(l - len, len);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < len + 1) {
      failures[static_cast<std::size_t>(l)] =
          "na_statistic_regression_form: collinear design for column " +
          std::to_string(l);
      return;
    }
    const Eigen::VectorXd coef = qr.solve(col);
    const double alpha_hat = coef(0);
    const double rss = (col - design * coef).squaredNorm();

    const double denom = rss + f_l * alpha_hat * alpha_hat;
    if (denom <= 1e-12 * col.squaredNorm() || !(denom > 0.0)) {
      failures[static_cast<std::size_t>(l)] =
          "na_statistic_regression_form: degenerate fit for column " +
          std::to_string(l);
      return;
    }
    result.f_values(l) = f_l;
    result.per_column(l) = f_l * f_l * alpha_hat * alpha_hat / denom;
  });
  for (const std::string& f : failures) {
    if (!f.empty()) throw numerical_error(f);
  }
  result.statistic = result.per_column.sum();
  return result;
}

double variance_estimator_from_gram(const Eigen::MatrixXd& gram) {
  const Eigen::Index n = gram.rows();
  if (n < 4) {
    throw input_error("variance_estimator: need n >= 4");
  }
  Eigen::MatrixXd g0 = gram;
  g0.diagonal().setZero();

  const double pair_sq = g0.squaredNorm();              // sum_{i != j} G_ij^2
  const Eigen::VectorXd rowsum = g0.rowwise().sum();
  const double total = rowsum.sum();                    // sum_{i != j} G_ij
  const double rowsum_sq = rowsum.squaredNorm();

  // Sums over mutually distinct index tuples by inclusion-exclusion on the
  // zero-diagonal Gram matrix; the closed forms are pinned against a literal
  // nested-loop oracle in the tests.
  const double triples = rowsum_sq - pair_sq;
  const double quads = total * total + 2.0 * pair_sq - 4.0 * rowsum_sq;

  const double dn = static_cast<double>(n);
  return 2.0 * pair_sq / (dn * (dn - 1.0)) -
         4.0 * triples / (dn * (dn - 1.0) * (dn - 2.0)) +
         2.0 * quads / (dn * (dn - 1.0) * (dn - 2.0) * (dn - 3.0));
}

double variance_estimator(const DataMatrix& x, const BandedPrecision& bp) {
  if (x.n() < 4) {
    throw input_error("variance_estimator: need n >= 4");
  }
  return variance_estimator_from_gram(precision_gram(x, bp));
}

TestReport run_test(const DataMatrix& x, int k, double alpha,
                    const RunOptions& opts) {
  const Eigen::Index n = x.n();
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw input_error("run_test: alpha must lie in (0, 1)");
  }
  if (k < 0) {
    throw input_error("run_test: k must be >= 0");
  }
  if (!opts.force_k && k > n / 10) {
    throw input_error("run_test: k must satisfy k <= n/10 (override with --force-k)");
  }

  const BandedPrecision bp = estimate_banded_precision(x, k);
  const DataMatrix z = apply_transform(x, bp);
  Eigen::MatrixXd gram =
      (z.values() * bp.d2.cwiseInverse().asDiagonal()) * z.values().transpose();
  gram = 0.5 * (gram + gram.transpose()).eval();

  const Eigen::VectorXd zbar = z.column_means();
  const double statistic =
      static_cast<double>(n) * zbar.cwiseQuotient(bp.d2.cwiseSqrt()).squaredNorm();

  const double var_hat = variance_estimator_from_gram(gram);
  if (!(var_hat > 0.0) || !std::isfinite(var_hat)) {
    throw numerical_error("run_test: variance estimate is not positive (" +
                          std::to_string(var_hat) + ")");
  }

  TestReport report;
  report.statistic = statistic;
  report.centering = static_cast<double>(x.p());
  report.sigma_hat = std::sqrt(var_hat);
  report.z_score = (statistic - report.centering) / report.sigma_hat;
  report.p_value = normal_upper_tail(report.z_score);
  report.k = k;
  report.alpha = alpha;
  report.reject = report.z_score >= normal_upper_quantile(alpha);
  report.n = n;
  report.p = x.p();
  return report;
}

TestReport run_test_auto(const DataMatrix& x, const SelectionConfig& cfg,
                         double alpha, const RunOptions& opts) {
  SelectionResult selection = stability_select(x, cfg);
  TestReport report = run_test(x, selection.chosen_k, alpha, opts);
  report.selection = std::move(selection);
  return report;
}

PopulationVariance population_variance(const SymmetricMatrix& sigma,
                                       const PopulationBandedPrecision& pop,
                                       const Eigen::VectorXd& mu,
                                       Eigen::Index n) {
  if (sigma.dim() != pop.p || mu.size() != pop.p) {
    throw input_error("population_variance: dimension mismatch");
  }
  const Eigen::MatrixXd omega = assemble(pop).values();
  const Eigen::MatrixXd product = omega * sigma.values();
  const double trace_sq = (product.array() * product.transpose().array()).sum();

  PopulationVariance out;
  out.sigma_n0_sq = 2.0 * trace_sq;
  const Eigen::VectorXd w = omega * mu;
  out.sigma_n_sq =
      out.sigma_n0_sq + 4.0 * static_cast<double>(n) * w.dot(sigma.values() * w);
  return out;
}

}  // namespace nat2
