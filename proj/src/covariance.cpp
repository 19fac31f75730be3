#include "nat2/covariance.hpp"

#include <cmath>
#include <sstream>

#include "nat2/errors.hpp"
#include "nat2/rng.hpp"

namespace nat2 {

namespace {

Eigen::MatrixXd build_ar1(double rho, Eigen::Index p) {
  if (std::abs(rho) >= 1.0) {
    throw input_error("Ar1: |rho| must be < 1");
  }
  Eigen::MatrixXd sigma(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    sigma(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = std::pow(rho, static_cast<double>(i - j));
      sigma(i, j) = v;
      sigma(j, i) = v;
    }
  }
  return sigma;
}

Eigen::MatrixXd build_block_diag(const BlockDiag& m, Eigen::Index p) {
  if (m.block_size < 1 || m.num_blocks < 0) {
    throw input_error("BlockDiag: block_size must be >= 1, num_blocks >= 0");
  }
  if (std::abs(m.rho) >= 1.0) {
    throw input_error("BlockDiag: |rho| must be < 1");
  }
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(p, p);
  for (int b = 0; b < m.num_blocks; ++b) {
    const Eigen::Index lo = static_cast<Eigen::Index>(b) * m.block_size;
    const Eigen::Index hi = lo + m.block_size;
    if (hi > p) break;  // trailing variables stay uncorrelated
    for (Eigen::Index i = lo; i < hi; ++i) {
      for (Eigen::Index j = lo; j < i; ++j) {
        sigma(i, j) = m.rho;
        sigma(j, i) = m.rho;
      }
    }
  }
  return sigma;
}

Eigen::MatrixXd build_random_sparse(const RandomSparse& m, Eigen::Index p) {
  if (m.nonzeros_per_row < 1 || m.nonzeros_per_row > p) {
    throw input_error("RandomSparse: nonzeros_per_row out of range");
  }
  if (!(m.magnitude_min <= m.magnitude_max)) {
    throw input_error("RandomSparse: magnitude range inverted");
  }
  Rng rng(mix_seed(m.seed, 0x5eedC0Fu));
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index row = 0; row < p; ++row) {
    const std::vector<int> cols = sample_without_replacement(
        static_cast<int>(p), m.nonzeros_per_row, rng);
    for (int c : cols) {
      const double magnitude =
          m.magnitude_min + (m.magnitude_max - m.magnitude_min) * rng.uniform();
      const double sign = (rng.uniform_int(2) == 0) ? -1.0 : 1.0;
      gamma(row, c) = sign * magnitude;
    }
  }
  Eigen::MatrixXd sigma = gamma * gamma.transpose();
  sigma.diagonal().array() += 1.0;
  sigma = 0.5 * (sigma + sigma.transpose()).eval();
  return sigma;
}

Eigen::MatrixXd build_equal_corr(double rho, Eigen::Index p) {
  if (std::abs(rho) >= 1.0) {
    throw input_error("EqualCorr: |rho| must be < 1");
  }
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(p, p, rho);
  sigma.diagonal().setOnes();
  return sigma;
}

void check_positive_definite(const Eigen::MatrixXd& sigma, bool is_explicit) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      sigma, Eigen::EigenvaluesOnly);
  const double smallest = eig.eigenvalues()(0);
  const double largest = eig.eigenvalues()(eig.eigenvalues().size() - 1);
  if (!(smallest > 1e-10 * std::max(largest, 0.0))) {
    std::ostringstream msg;
    msg << "materialize: matrix is not positive definite (smallest eigenvalue "
        << smallest << ")";
    if (is_explicit) throw input_error(msg.str());
    throw numerical_error(msg.str());
  }
}

}  // namespace

SymmetricMatrix materialize(const CovarianceModel& model, Eigen::Index p) {
  if (p < 1) {
    throw input_error("materialize: dimension must be >= 1");
  }
  Eigen::MatrixXd sigma;
  bool is_explicit = false;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Ar1>) {
          sigma = build_ar1(m.rho, p);
        } else if constexpr (std::is_same_v<T, BlockDiag>) {
          sigma = build_block_diag(m, p);
        } else if constexpr (std::is_same_v<T, RandomSparse>) {
          sigma = build_random_sparse(m, p);
        } else if constexpr (std::is_same_v<T, EqualCorr>) {
          sigma = build_equal_corr(m.rho, p);
        } else {
          if (m.sigma.dim() != p) {
            throw input_error("materialize: Explicit dimension mismatch");
          }
          sigma = m.sigma.values();
          is_explicit = true;
        }
      },
      model);
  check_positive_definite(sigma, is_explicit);
  return SymmetricMatrix(std::move(sigma));
}

std::string model_label(const CovarianceModel& model) {
  std::ostringstream out;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Ar1>) {
          out << "ar1(" << m.rho << ")";
        } else if constexpr (std::is_same_v<T, BlockDiag>) {
          out << "block(" << m.block_size << "x" << m.num_blocks << ","
              << m.rho << ")";
        } else if constexpr (std::is_same_v<T, RandomSparse>) {
          out << "random_sparse(" << m.nonzeros_per_row << ")";
        } else if constexpr (std::is_same_v<T, EqualCorr>) {
          out << "equal_corr(" << m.rho << ")";
        } else {
          out << "explicit(" << m.sigma.dim() << ")";
        }
      },
      model);
  return out.str();
}

}  // namespace nat2
