#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "nat2/matrix.hpp"

namespace nat2 {

/// sigma_ij = rho^|i-j|.
struct Ar1 {
  double rho = 0.0;
};

/// Unit diagonal; correlation rho inside each of the first num_blocks
/// contiguous blocks of block_size variables. Variables past the covered
/// range, and any trailing remainder, are uncorrelated with unit variance.
struct BlockDiag {
  int block_size = 2;
  double rho = 0.6;
  int num_blocks = 4;
};

/// Sigma = Gamma Gamma' + I where each row of Gamma has nonzeros_per_row
/// entries at positions drawn without replacement from {0, ..., p-1}
/// (the diagonal position may be among them), with magnitudes
/// Unif(magnitude_min, magnitude_max) times a random sign. One seeded
/// generator drives positions, magnitudes and signs.
struct RandomSparse {
  int nonzeros_per_row = 4;
  double magnitude_min = 1.0;
  double magnitude_max = 2.0;
  std::uint64_t seed = 0;
};

/// Unit diagonal, sigma_ij = rho for i != j.
struct EqualCorr {
  double rho = 0.0;
};

/// A user-supplied covariance, validated for positive definiteness at
/// materialization.
struct Explicit {
  SymmetricMatrix sigma;
};

using CovarianceModel =
    std::variant<Ar1, BlockDiag, RandomSparse, EqualCorr, Explicit>;

/// Build the dense p x p covariance for a model. Deterministic: the same
/// (model, p, seed) produces a bit-identical matrix. Every result is checked
/// positive definite (smallest eigenvalue > 1e-10 times the largest); an
/// Explicit matrix failing the check is rejected with the smallest
/// eigenvalue in the message.
SymmetricMatrix materialize(const CovarianceModel& model, Eigen::Index p);

/// Short label for CSV output ("ar1(0.6)", "equal_corr(0.6)", ...).
std::string model_label(const CovarianceModel& model);

}  // namespace nat2
