#include "nat2/ksel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nat2/errors.hpp"
#include "nat2/parallel.hpp"
#include "nat2/precision.hpp"
#include "nat2/rng.hpp"

namespace nat2 {

double snr_estimate(const DataMatrix& x, int k) {
  const Eigen::Index n = x.n();
  const Eigen::Index p = x.p();
  if (n < 4) {
    throw input_error("snr_estimate: need n >= 4");
  }
  const BandedPrecision bp = estimate_banded_precision(x, k);
  const DataMatrix z = apply_transform(x, bp);
  const Eigen::VectorXd zbar = z.column_means();
  const Eigen::VectorXd u = zbar.cwiseQuotient(bp.d2);  // D^{-1} (I-A) xbar

  const double statistic = static_cast<double>(n) * zbar.dot(u);
  const double numerator = statistic - static_cast<double>(p);

  Eigen::MatrixXd gram = precision_gram(x, bp);
  gram.diagonal().setZero();
  const double offdiag_sq = gram.squaredNorm();
  const double offdiag_sum = gram.sum();

  // w_i = xbar' Sigma_k^{-1} (X_i - xbar) = (Z_i - zbar)' D^{-1} zbar
  const Eigen::VectorXd w =
      (z.values() * u).array() - zbar.dot(u);
  const double dn = static_cast<double>(n);
  const double g_hat = w.squaredNorm() / dn -
                       (offdiag_sum * offdiag_sum) / (dn * dn * dn * dn);

  const double var_term = 2.0 * offdiag_sq / (dn * dn) + 4.0 * dn * g_hat;
  if (!std::isfinite(var_term) || !std::isfinite(numerator)) {
    throw numerical_error("snr_estimate: non-finite term (numerator=" +
                          std::to_string(numerator) + ", variance term=" +
                          std::to_string(var_term) + ")");
  }
  if (var_term <= 1e-12) {
    return -std::numeric_limits<double>::infinity();
  }
  return numerator / std::sqrt(var_term);
}

std::vector<std::vector<int>> selection_folds(Eigen::Index n,
                                              const SelectionConfig& cfg) {
  const int parts = cfg.parts;
  if (parts < 2 || parts > n) {
    throw input_error("selection_folds: parts must lie in [2, n]");
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = static_cast<int>(i);
  Rng rng(mix_seed(cfg.seed, 0xF01D5u));
  fisher_yates_shuffle(order, rng);

  const Eigen::Index base = n / parts;
  const Eigen::Index remainder = n % parts;
  std::vector<std::vector<int>> folds(static_cast<std::size_t>(parts));
  Eigen::Index pos = 0;
  for (int f = 0; f < parts; ++f) {
    const Eigen::Index size = base + (f < remainder ? 1 : 0);
    folds[static_cast<std::size_t>(f)].assign(order.begin() + pos,
                                              order.begin() + pos + size);
    pos += size;
  }
  return folds;
}

SelectionResult stability_select(const DataMatrix& x, const SelectionConfig& cfg) {
  const Eigen::Index n = x.n();
  const int max_k = cfg.max_k.value_or(static_cast<int>(n / 10));
  if (max_k < 0 || max_k >= n) {
    throw input_error("stability_select: max_k must lie in [0, n)");
  }
  const auto folds = selection_folds(n, cfg);

  Eigen::Index largest_fold = 0;
  for (const auto& f : folds) {
    largest_fold = std::max<Eigen::Index>(largest_fold,
                                          static_cast<Eigen::Index>(f.size()));
  }
  const Eigen::Index retained = n - largest_fold;
  if (retained < max_k + 3 || retained < 4) {
    throw input_error(
        "stability_select: fold too small for max k in grid (retained " +
        std::to_string(retained) + " samples, need >= " +
        std::to_string(std::max<Eigen::Index>(max_k + 3, 4)) + ")");
  }

  const int parts = cfg.parts;
  const int grid = max_k + 1;
  SelectionResult result;
  result.per_fold_k.assign(static_cast<std::size_t>(parts), 0);
  result.per_k_snr.setZero(parts, grid);

  parallel_for(static_cast<std::int64_t>(parts) * grid, [&](std::int64_t item) {
    const int h = static_cast<int>(item / grid);
    const int k = static_cast<int>(item % grid);
    std::vector<char> dropped(static_cast<std::size_t>(n), 0);
    for (int idx : folds[static_cast<std::size_t>(h)]) {
      dropped[static_cast<std::size_t>(idx)] = 1;
    }
    Eigen::MatrixXd train(n - static_cast<Eigen::Index>(
                                  folds[static_cast<std::size_t>(h)].size()),
                          x.p());
    Eigen::Index row = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!dropped[static_cast<std::size_t>(i)]) {
        train.row(row++) = x.values().row(i);
      }
    }
    double value;
    try {
      value = snr_estimate(DataMatrix(train), k);
    } catch (const numerical_error&) {
      value = -std::numeric_limits<double>::infinity();
    }
    result.per_k_snr(h, k) = value;
  });

  for (int h = 0; h < parts; ++h) {
    int best = 0;
    for (int k = 1; k < grid; ++k) {
      if (result.per_k_snr(h, k) > result.per_k_snr(h, best)) best = k;
    }
    result.per_fold_k[static_cast<std::size_t>(h)] = best;
  }
  std::vector<int> sorted = result.per_fold_k;
  std::sort(sorted.begin(), sorted.end());
  // lower median keeps the chosen band width integral for even H
  result.chosen_k = sorted[(sorted.size() - 1) / 2];
  return result;
}

}  // namespace nat2
