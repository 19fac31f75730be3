#pragma once

#include <vector>

#include "nat2/matrix.hpp"

namespace nat2 {

/// Banded Cholesky precision estimate fitted from data: the factor pair
/// (A-hat, D-hat) representing (I - A)' D^{-1} (I - A). Row l of the
/// strictly lower triangular A holds the no-intercept least-squares
/// coefficients of raw column l on its min(k, l) immediate predecessors;
/// d2[l] is the residual sum of squares over n.
struct BandedPrecision {
  int k = 0;
  Eigen::Index p = 0;
  Eigen::Index n_used = 0;
  std::vector<Eigen::VectorXd> coeff_rows;  // coeff_rows[l] covers columns [l - len, l)
  Eigen::VectorXd d2;

  Eigen::Index row_start(Eigen::Index l) const {
    return l - static_cast<Eigen::Index>(coeff_rows[static_cast<std::size_t>(l)].size());
  }

  /// Dense strictly lower triangular A with zeros outside the band.
  Eigen::MatrixXd coefficient_matrix() const;
};

/// Population counterpart built from a known covariance: row l of A_k is
/// Sigma_{l, l-k:l-1} Sigma_{l-k:l-1}^{-1} and d2[l] is the conditional
/// variance of variable l given its predecessors.
struct PopulationBandedPrecision {
  int k = 0;
  Eigen::Index p = 0;
  std::vector<Eigen::VectorXd> coeff_rows;
  Eigen::VectorXd d2;

  Eigen::Index row_start(Eigen::Index l) const {
    return l - static_cast<Eigen::Index>(coeff_rows[static_cast<std::size_t>(l)].size());
  }

  Eigen::MatrixXd coefficient_matrix() const;
};

/// Fit the banded estimator from raw (uncentered, no intercept) columns.
/// Requires 0 <= k <= n - 2. Per-column regressions are solved by QR of the
/// predecessor block and run in parallel with deterministic output.
/// Throws numerical_error when a predecessor block has relative condition
/// beyond 1e12, or when a residual variance degenerates to zero.
BandedPrecision estimate_banded_precision(const DataMatrix& x, int k);

/// Exact population factor pair for a known covariance and band width k.
PopulationBandedPrecision population_banded_precision(const SymmetricMatrix& sigma,
                                                      int k);

/// Dense (I - A)' D^{-1} (I - A), symmetric positive definite.
SymmetricMatrix assemble(const BandedPrecision& bp);
SymmetricMatrix assemble(const PopulationBandedPrecision& bp);

/// Row-wise transform Z with Z_i = (I - A) X_i, so that
/// X Sigma_k^{-1} X' = Z D^{-1} Z' without forming the dense p x p matrix.
DataMatrix apply_transform(const DataMatrix& x, const BandedPrecision& bp);

/// n x n Gram matrix of X_i' Sigma_k^{-1} X_j, computed through the banded
/// factors in O(npk + n^2 p).
Eigen::MatrixXd precision_gram(const DataMatrix& x, const BandedPrecision& bp);

}  // namespace nat2
