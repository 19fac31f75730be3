#include "nat2/matrix.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "nat2/errors.hpp"

namespace nat2 {

DataMatrix::DataMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 2) {
    throw input_error("DataMatrix: need at least 2 samples (rows)");
  }
  if (values_.cols() < 1) {
    throw input_error("DataMatrix: need at least 1 variable (column)");
  }
  if (!values_.allFinite()) {
    throw input_error("DataMatrix: entries must be finite");
  }
}

SymmetricMatrix::SymmetricMatrix(Eigen::MatrixXd values)
    : values_(std::move(values)) {
  if (values_.rows() != values_.cols() || values_.rows() < 1) {
    throw input_error("SymmetricMatrix: matrix must be square and non-empty");
  }
  if (!values_.allFinite()) {
    throw input_error("SymmetricMatrix: entries must be finite");
  }
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < values_.cols(); ++j) {
      const double a = values_(i, j);
      const double b = values_(j, i);
      if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) {
        throw input_error("SymmetricMatrix: asymmetric at (" +
                          std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
}

SymmetricMatrix matrix_power(const SymmetricMatrix& s, double eta) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.values());
  if (eig.info() != Eigen::Success) {
    throw numerical_error("matrix_power: eigendecomposition failed");
  }
  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
  const double largest = lambda(lambda.size() - 1);
  const double tol = 1e-12 * std::max(largest, 0.0);
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) <= tol) {
      throw numerical_error("matrix_power: eigenvalue " + std::to_string(i) +
                            " (" + std::to_string(lambda(i)) +
                            ") is at or below tolerance; matrix is singular");
    }
  }
  const Eigen::VectorXd powered =
      lambda.array().pow(eta).matrix();
  Eigen::MatrixXd result = eig.eigenvectors() * powered.asDiagonal() *
                           eig.eigenvectors().transpose();
  result = 0.5 * (result + result.transpose()).eval();
  return SymmetricMatrix(std::move(result));
}

}  // namespace nat2
