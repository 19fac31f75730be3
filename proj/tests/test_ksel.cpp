#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nat2/covariance.hpp"
#include "nat2/errors.hpp"
#include "nat2/ksel.hpp"
#include "nat2/precision.hpp"
#include "nat2/simgen.hpp"
#include "test_util.hpp"

using namespace nat2;

namespace {

// Literal re-implementation of the SNR estimator from raw sums.
double snr_reference(const DataMatrix& x, int k) {
  const Eigen::Index n = x.n();
  const Eigen::Index p = x.p();
  const Eigen::MatrixXd omega =
      assemble(estimate_banded_precision(x, k)).values();
  const Eigen::VectorXd xbar = x.column_means();
  const double statistic =
      static_cast<double>(n) * xbar.dot(omega * xbar);

  double cross_sq = 0.0;
  double cross_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double gij = x.values().row(i) * omega * x.values().row(j).transpose();
      cross_sq += gij * gij;
      cross_sum += gij;
    }
  }
  double quad_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd centered = x.values().row(i).transpose() - xbar;
    const double w = xbar.dot(omega * centered);
    quad_sum += w * w;
  }
  const double dn = static_cast<double>(n);
  const double g_hat = quad_sum / dn - cross_sum * cross_sum / std::pow(dn, 4);
  const double var_term = 2.0 * cross_sq / (dn * dn) + 4.0 * dn * g_hat;
  return (statistic - static_cast<double>(p)) / std::sqrt(var_term);
}

}  // namespace

TEST_CASE("snr estimate matches a literal-formula oracle") {
  Rng rng(61);
  for (int trial = 0; trial < 8; ++trial) {
    const Eigen::Index n = 6 + static_cast<Eigen::Index>(rng.uniform_int(6));
    const Eigen::Index p = 3 + static_cast<Eigen::Index>(rng.uniform_int(5));
    const int k = static_cast<int>(rng.uniform_int(3));
    const DataMatrix x(testutil::gaussian_matrix(rng, n, p));
    const double got = snr_estimate(x, k);
    const double want = snr_reference(x, k);
    CHECK(std::abs(got - want) < 1e-10 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("snr numerator goes negative when the sample mean vanishes") {
  Rng rng(67);
  const Eigen::Index n = 8;
  const Eigen::Index p = 4;
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n / 2; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.normal();
    x.row(n / 2 + i) = -x.row(i);  // antithetic pairs: xbar is exactly 0
  }
  const double snr = snr_estimate(DataMatrix(x), 0);
  CHECK(snr < 0.0);
}

TEST_CASE("clustered ar1 signal favors k=0 over k=1 on average") {
  // direction implied by the known SNR values of the clustered design
  ScenarioConfig cfg;
  cfg.n = 60;
  cfg.p = 200;
  cfg.model = Ar1{0.6};
  cfg.signal = SignalSpec{0.0, 0.0, Placement::clustered, 0};
  cfg.seed = 515;
  const ScenarioSampler sampler(cfg);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(cfg.p);
  mu.head(8).setConstant(0.2);

  double mean_k0 = 0.0;
  double mean_k1 = 0.0;
  const int reps = 200;
  for (int rep = 0; rep < reps; ++rep) {
    Eigen::MatrixXd values = sampler.sample(rep).values();
    values.rowwise() += mu.transpose();
    const DataMatrix x(values);
    mean_k0 += snr_estimate(x, 0);
    mean_k1 += snr_estimate(x, 1);
  }
  mean_k0 /= reps;
  mean_k1 /= reps;
  CHECK(mean_k0 > mean_k1);
}

TEST_CASE("selection folds follow the documented shuffle") {
  SelectionConfig cfg;
  cfg.parts = 4;
  cfg.seed = 99;
  const Eigen::Index n = 14;
  const auto folds = selection_folds(n, cfg);

  // independent re-implementation of the documented partition
  std::vector<int> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = static_cast<int>(i);
  Rng rng(mix_seed(cfg.seed, 0xF01D5u));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(i))]);
  }
  std::size_t pos = 0;
  for (int f = 0; f < cfg.parts; ++f) {
    const std::size_t size = static_cast<std::size_t>(n / cfg.parts) +
                             (f < n % cfg.parts ? 1 : 0);
    REQUIRE(folds[static_cast<std::size_t>(f)].size() == size);
    for (std::size_t j = 0; j < size; ++j) {
      CHECK(folds[static_cast<std::size_t>(f)][j] == order[pos + j]);
    }
    pos += size;
  }

  // sizes: first n mod H folds carry the remainder
  CHECK(folds[0].size() == 4);
  CHECK(folds[1].size() == 4);
  CHECK(folds[2].size() == 3);
  CHECK(folds[3].size() == 3);
}

TEST_CASE("stability selection is deterministic and respects the grid") {
  Rng rng(71);
  const DataMatrix x(testutil::gaussian_matrix(rng, 40, 10));
  SelectionConfig cfg;
  cfg.max_k = 3;
  cfg.parts = 5;
  cfg.seed = 7;
  const SelectionResult a = stability_select(x, cfg);
  const SelectionResult b = stability_select(x, cfg);
  CHECK(a.chosen_k == b.chosen_k);
  CHECK(a.per_fold_k == b.per_fold_k);
  CHECK(a.per_k_snr == b.per_k_snr);
  CHECK(a.chosen_k >= 0);
  CHECK(a.chosen_k <= 3);
  std::vector<int> sorted = a.per_fold_k;
  std::sort(sorted.begin(), sorted.end());
  CHECK(a.chosen_k == sorted[(sorted.size() - 1) / 2]);  // lower median
  CHECK(a.per_k_snr.rows() == 5);
  CHECK(a.per_k_snr.cols() == 4);
  for (int h = 0; h < 5; ++h) {
    const int best = a.per_fold_k[static_cast<std::size_t>(h)];
    for (int k = 0; k <= 3; ++k) {
      CHECK(a.per_k_snr(h, best) >= a.per_k_snr(h, k));
      if (a.per_k_snr(h, k) == a.per_k_snr(h, best)) {
        CHECK(best <= k);  // first maximizer on ties
      }
    }
  }
}

TEST_CASE("median aggregation uses the lower middle value") {
  // construct data where the per-fold argmax values are known via injection:
  // exercise the median rule directly through sorted copies instead.
  std::vector<int> odd{2, 3, 3, 4, 5};
  std::sort(odd.begin(), odd.end());
  CHECK(odd[(odd.size() - 1) / 2] == 3);
  std::vector<int> all_one{1, 1, 1, 1, 1};
  CHECK(all_one[(all_one.size() - 1) / 2] == 1);
  std::vector<int> even{1, 2, 4, 7};
  std::sort(even.begin(), even.end());
  CHECK(even[(even.size() - 1) / 2] == 2);  // lower median
}

TEST_CASE("selection preconditions") {
  Rng rng(73);
  const DataMatrix x(testutil::gaussian_matrix(rng, 12, 5));
  SelectionConfig cfg;
  cfg.parts = 1;
  CHECK_THROWS_AS(stability_select(x, cfg), input_error);
  cfg.parts = 5;
  cfg.max_k = 11;
  CHECK_THROWS_AS(stability_select(x, cfg), input_error);
  cfg.max_k = 8;  // retained 9 < 8 + 3
  CHECK_THROWS_AS(stability_select(x, cfg), input_error);
}

TEST_CASE("equal correlation steers the selection away from small k") {
  // under the spiked covariance the small-k variance is huge, so with a
  // sparse signal present the estimated snr favors k >= 3 most of the time
  ScenarioConfig cfg;
  cfg.n = 60;
  cfg.p = 200;
  cfg.model = EqualCorr{0.6};
  cfg.signal = SignalSpec{0.6, 0.2, Placement::random, 7};
  cfg.seed = 404;
  const ScenarioSampler sampler(cfg);
  int at_least_3 = 0;
  const int runs = 40;
  for (int run = 0; run < runs; ++run) {
    SelectionConfig sel;
    sel.parts = 5;
    sel.max_k = 10;
    sel.seed = mix_seed(31, static_cast<std::uint64_t>(run));
    if (stability_select(sampler.sample(run), sel).chosen_k >= 3) ++at_least_3;
  }
  CHECK(at_least_3 > runs / 2);
}

TEST_CASE("row permutation with matching fold identities keeps per-fold picks") {
  Rng rng(79);
  const Eigen::MatrixXd base = testutil::gaussian_matrix(rng, 30, 8);
  SelectionConfig cfg;
  cfg.max_k = 2;
  cfg.parts = 3;
  cfg.seed = 11;
  const SelectionResult direct = stability_select(DataMatrix(base), cfg);

  // reorder rows so that the shuffled folds become contiguous, then evaluate
  // each fold by hand with snr_estimate; the per-fold argmax must agree.
  const auto folds = selection_folds(30, cfg);
  for (std::size_t h = 0; h < folds.size(); ++h) {
    std::vector<int> keep;
    for (std::size_t other = 0; other < folds.size(); ++other) {
      if (other == h) continue;
      keep.insert(keep.end(), folds[other].begin(), folds[other].end());
    }
    std::sort(keep.begin(), keep.end());
    Eigen::MatrixXd train(static_cast<Eigen::Index>(keep.size()), base.cols());
    for (std::size_t i = 0; i < keep.size(); ++i) {
      train.row(static_cast<Eigen::Index>(i)) = base.row(keep[i]);
    }
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 2; ++k) {
      const double value = snr_estimate(DataMatrix(train), k);
      if (value > best_value) {
        best_value = value;
        best = k;
      }
    }
    CHECK(best == direct.per_fold_k[h]);
  }
}
