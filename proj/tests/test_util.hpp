#pragma once

#include <Eigen/Dense>

#include "nat2/matrix.hpp"
#include "nat2/rng.hpp"

namespace nat2::testutil {

inline Eigen::MatrixXd gaussian_matrix(Rng& rng, Eigen::Index n, Eigen::Index p) {
  Eigen::MatrixXd m(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) m(i, j) = rng.normal();
  }
  return m;
}

inline SymmetricMatrix random_spd(Rng& rng, Eigen::Index p) {
  const Eigen::MatrixXd a = gaussian_matrix(rng, p, p);
  Eigen::MatrixXd s = a.transpose() * a;
  s.diagonal().array() += static_cast<double>(p);  // keep well conditioned
  s = 0.5 * (s + s.transpose()).eval();
  return SymmetricMatrix(s);
}

inline double relative_error(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace nat2::testutil
