#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nat2/matrix.hpp"

namespace nat2 {

/// Stability-selection setup. The candidate grid is {0, ..., max_k} with
/// max_k defaulting to floor(n / 10); parts is the number H of subsample
/// folds (typical choices 4..10, default 5).
struct SelectionConfig {
  std::optional<int> max_k;
  int parts = 5;
  std::uint64_t seed = 0;
};

struct SelectionResult {
  int chosen_k = 0;                 // lower median of per_fold_k
  std::vector<int> per_fold_k;      // argmax per fold, smallest k on ties
  Eigen::MatrixXd per_k_snr;        // parts x (max_k + 1)
};

/// Plug-in estimate of the signal-to-noise ratio at band width k. Returns
/// -infinity when the variance term under the square root degenerates
/// (<= 1e-12), so degenerate fits can never win the selection.
double snr_estimate(const DataMatrix& x, int k);

/// The fold partition used by stability_select: indices 0..n-1 are passed
/// through a Fisher-Yates shuffle driven by mix_seed(cfg.seed, 0xF01D5),
/// swapping position i with uniform_int(i + 1) for i = n-1 down to 1, then
/// split into contiguous blocks; the first n mod H folds take one extra
/// sample. Exposed so the assignment is independently checkable.
std::vector<std::vector<int>> selection_folds(Eigen::Index n,
                                              const SelectionConfig& cfg);

/// Leave-one-fold-out maximization of snr_estimate over the candidate grid,
/// aggregated by the (lower) median of the per-fold argmax values.
/// A fold/k evaluation that fails numerically scores -infinity rather than
/// aborting the selection.
SelectionResult stability_select(const DataMatrix& x, const SelectionConfig& cfg);

}  // namespace nat2
