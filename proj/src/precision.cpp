#include "nat2/precision.hpp"

#include <cmath>
#include <string>

#include "nat2/errors.hpp"
#include "nat2/parallel.hpp"

namespace nat2 {

namespace {

Eigen::MatrixXd dense_factor(Eigen::Index p,
                             const std::vector<Eigen::VectorXd>& rows) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index l = 0; l < p; ++l) {
    const Eigen::VectorXd& row = rows[static_cast<std::size_t>(l)];
    const Eigen::Index start = l - row.size();
    for (Eigen::Index j = 0; j < row.size(); ++j) {
      a(l, start + j) = row(j);
    }
  }
  return a;
}

SymmetricMatrix assemble_impl(Eigen::Index p,
                              const std::vector<Eigen::VectorXd>& rows,
                              const Eigen::VectorXd& d2) {
  // B = D^{-1/2} (I - A); the assembled matrix is B'B.
  Eigen::MatrixXd b = -dense_factor(p, rows);
  b.diagonal().array() += 1.0;
  for (Eigen::Index l = 0; l < p; ++l) {
    b.row(l) /= std::sqrt(d2(l));
  }
  Eigen::MatrixXd m = b.transpose() * b;
  m = 0.5 * (m + m.transpose()).eval();
  return SymmetricMatrix(std::move(m));
}

void check_d2(const Eigen::VectorXd& d2) {
  for (Eigen::Index l = 0; l < d2.size(); ++l) {
    if (!(d2(l) > 0.0) || !std::isfinite(d2(l))) {
      throw numerical_error("banded precision: non-positive residual variance at column " +
                            std::to_string(l));
    }
  }
}

}  // namespace

Eigen::MatrixXd BandedPrecision::coefficient_matrix() const {
  return dense_factor(p, coeff_rows);
}

Eigen::MatrixXd PopulationBandedPrecision::coefficient_matrix() const {
  return dense_factor(p, coeff_rows);
}

BandedPrecision estimate_banded_precision(const DataMatrix& x, int k) {
  const Eigen::Index n = x.n();
  const Eigen::Index p = x.p();
  if (k < 0) {
    throw input_error("estimate_banded_precision: k must be >= 0");
  }
  if (k > n - 2) {
    throw input_error("estimate_banded_precision: k must satisfy k <= n - 2 (got k=" +
                      std::to_string(k) + ", n=" + std::to_string(n) + ")");
  }

  const Eigen::MatrixXd& values = x.values();
  BandedPrecision bp;
  bp.k = k;
  bp.p = p;
  bp.n_used = n;
  bp.coeff_rows.resize(static_cast<std::size_t>(p));
  bp.d2.resize(p);

  std::vector<std::string> failures(static_cast<std::size_t>(p));
  parallel_for(p, [&](std::int64_t l) {
    const Eigen::Index len = std::min<Eigen::Index>(k, l);
    const Eigen::VectorXd col = values.col(l);
    const double col_sq = col.squaredNorm();
    double rss;
    if (len == 0) {
      bp.coeff_rows[static_cast<std::size_t>(l)] = Eigen::VectorXd();
      rss = col_sq;
    } else {
      const auto pred = values.middleCols(l - len, len);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(pred);
      const Eigen::MatrixXd& r = qr.matrixR();
      const double r_max = std::abs(r(0, 0));
      const double r_min = std::abs(r(len - 1, len - 1));
      if (!(r_min > 0.0) || r_max / r_min > 1e12) {
        failures[static_cast<std::size_t>(l)] =
            "estimate_banded_precision: singular predecessor block for column " +
            std::to_string(l);
        return;
      }
      const Eigen::VectorXd coeffs = qr.solve(col);
      bp.coeff_rows[static_cast<std::size_t>(l)] = coeffs;
      rss = (col - pred * coeffs).squaredNorm();
    }
    if (rss <= 1e-12 * col_sq || !(rss > 0.0)) {
      failures[static_cast<std::size_t>(l)] =
          "estimate_banded_precision: degenerate residual variance at column " +
          std::to_string(l);
      return;
    }
    bp.d2(l) = rss / static_cast<double>(n);
  });
  for (const std::string& f : failures) {
    if (!f.empty()) throw numerical_error(f);
  }
  return bp;
}

PopulationBandedPrecision population_banded_precision(const SymmetricMatrix& sigma,
                                                      int k) {
  const Eigen::Index p = sigma.dim();
  if (k < 0) {
    throw input_error("population_banded_precision: k must be >= 0");
  }
  const Eigen::MatrixXd& s = sigma.values();
  PopulationBandedPrecision bp;
  bp.k = k;
  bp.p = p;
  bp.coeff_rows.resize(static_cast<std::size_t>(p));
  bp.d2.resize(p);
  for (Eigen::Index l = 0; l < p; ++l) {
    const Eigen::Index len = std::min<Eigen::Index>(k, l);
    if (len == 0) {
      bp.coeff_rows[static_cast<std::size_t>(l)] = Eigen::VectorXd();
      bp.d2(l) = s(l, l);
    } else {
      const Eigen::MatrixXd block = s.block(l - len, l - len, len, len);
      const Eigen::VectorXd cross = s.block(l - len, l, len, 1);
      const Eigen::LLT<Eigen::MatrixXd> llt(block);
      if (llt.info() != Eigen::Success) {
        throw numerical_error(
            "population_banded_precision: singular leading block for column " +
            std::to_string(l));
      }
      const Eigen::VectorXd coeffs = llt.solve(cross);
      bp.coeff_rows[static_cast<std::size_t>(l)] = coeffs;
      bp.d2(l) = s(l, l) - cross.dot(coeffs);
    }
    if (!(bp.d2(l) > 0.0)) {
      throw numerical_error(
          "population_banded_precision: non-positive conditional variance at column " +
          std::to_string(l));
    }
  }
  return bp;
}

SymmetricMatrix assemble(const BandedPrecision& bp) {
  check_d2(bp.d2);
  return assemble_impl(bp.p, bp.coeff_rows, bp.d2);
}

SymmetricMatrix assemble(const PopulationBandedPrecision& bp) {
  check_d2(bp.d2);
  return assemble_impl(bp.p, bp.coeff_rows, bp.d2);
}

DataMatrix apply_transform(const DataMatrix& x, const BandedPrecision& bp) {
  if (x.p() != bp.p) {
    throw input_error("apply_transform: dimension mismatch");
  }
  const Eigen::MatrixXd& values = x.values();
  Eigen::MatrixXd z = values;
  for (Eigen::Index l = 0; l < bp.p; ++l) {
    const Eigen::VectorXd& row = bp.coeff_rows[static_cast<std::size_t>(l)];
    if (row.size() == 0) continue;
    z.col(l).noalias() -= values.middleCols(l - row.size(), row.size()) * row;
  }
  return DataMatrix(std::move(z));
}

Eigen::MatrixXd precision_gram(const DataMatrix& x, const BandedPrecision& bp) {
  const DataMatrix z = apply_transform(x, bp);
  const Eigen::MatrixXd scaled =
      z.values() * bp.d2.cwiseInverse().asDiagonal();
  Eigen::MatrixXd gram = scaled * z.values().transpose();
  gram = 0.5 * (gram + gram.transpose()).eval();
  return gram;
}

}  // namespace nat2
