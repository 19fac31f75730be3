#pragma once

#include <Eigen/Dense>

namespace nat2 {

/// n x p sample matrix, rows are i.i.d. observations. Immutable after
/// construction; the constructor enforces n >= 2, p >= 1 and finiteness.
class DataMatrix {
 public:
  explicit DataMatrix(Eigen::MatrixXd values);

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  Eigen::Index n() const noexcept { return values_.rows(); }
  Eigen::Index p() const noexcept { return values_.cols(); }

  /// Column means as a vector of length p.
  Eigen::VectorXd column_means() const { return values_.colwise().mean(); }

 private:
  Eigen::MatrixXd values_;
};

/// Dense real symmetric matrix. Construction rejects asymmetry beyond
/// |a_ij - a_ji| <= 1e-12 * max(1, |a_ij|).
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(Eigen::MatrixXd values);

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  Eigen::Index dim() const noexcept { return values_.rows(); }

 private:
  Eigen::MatrixXd values_;
};

/// S^eta through the symmetric eigendecomposition: eigenvalues are raised to
/// eta, eigenvectors kept. Throws numerical_error naming the offending index
/// when an eigenvalue falls at or below 1e-12 times the largest one.
SymmetricMatrix matrix_power(const SymmetricMatrix& s, double eta);

}  // namespace nat2
