#pragma once

#include <array>

#include "nat2/matrix.hpp"

namespace nat2 {

/// Known-covariance test specification for the statistic family
/// T_0^2(eta) = n xbar' Sigma^{2 eta} xbar.
struct OracleSpec {
  SymmetricMatrix sigma;
  Eigen::VectorXd mu;
  Eigen::Index n = 0;
  double eta = -0.5;
  double alpha = 0.05;
};

/// n xbar' Sigma^{2 eta} xbar for observed data (n taken from the data).
double oracle_statistic(const DataMatrix& x, const OracleSpec& spec);

/// Signal-to-noise ratio
///   n mu' Sigma^{2 eta} mu / sqrt(2 tr(Sigma^{2+4 eta}) + 4 n mu' Sigma^{1+4 eta} mu).
double oracle_snr(const OracleSpec& spec);

/// Asymptotic power of the level-alpha oracle test,
///   Phi(-z_alpha sigma_0/sigma + n mu' Sigma^{2 eta} mu / sigma).
double oracle_power(const OracleSpec& spec);

/// Eigen-system summary with the cut indices used by the power-ordering
/// comparison: lambda_bar^2 and lambda_tilde^2 are the mean squared
/// eigenvalue and mean squared inverse eigenvalue; m1/m2 are 1-based
/// positions in the ascending eigenvalue order (m1 = 0 or m2 = p + 1 when
/// the respective set is empty).
struct SpectralSummary {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // column j pairs with eigenvalues(j)
  double lambda_bar_sq = 0.0;
  double lambda_tilde_sq = 0.0;
  Eigen::Index m1 = 0;
  Eigen::Index m2 = 0;
};

SpectralSummary spectral_summary(const SymmetricMatrix& sigma);

enum class EigenBlock { bottom, top };

/// Power comparison of eta in {-1, -1/2, 0} for a mean vector lying in the
/// bottom (xi_1..xi_{m1}) or top (xi_{m2}..xi_p) eigen-block, under the
/// numerically checked local-alternative condition.
struct Prop3Report {
  std::array<double, 3> etas{-1.0, -0.5, 0.0};
  std::array<double, 3> beta{};         // power at each eta
  std::array<double, 3> local_ratio{};  // n mu' Sigma^{1+4eta} mu / tr(Sigma^{2+4eta})
  double projection_residual = 0.0;     // relative distance of mu from the block
  bool local_condition_ok = false;      // all ratios < 0.1
  bool ordering_holds = false;
};

/// Verifies mu lies in the designated eigen-block (relative projection
/// residual < 1e-8, otherwise a precondition error), reports the local
/// condition ratios, and checks the expected power ordering:
/// beta(-1) >= beta(-1/2) >= beta(0) for the bottom block, reversed for the
/// top block.
Prop3Report proposition3_check(const SymmetricMatrix& sigma,
                               const Eigen::VectorXd& mu, Eigen::Index n,
                               double alpha, EigenBlock block);

}  // namespace nat2
