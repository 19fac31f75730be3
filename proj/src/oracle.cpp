#include "nat2/oracle.hpp"

#include <cmath>

#include "nat2/errors.hpp"
#include "nat2/normal.hpp"

namespace nat2 {

namespace {

struct EigenSystem {
  Eigen::VectorXd lambda;  // ascending, all positive
  Eigen::MatrixXd vectors;
};

EigenSystem decompose(const SymmetricMatrix& sigma) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma.values());
  if (eig.info() != Eigen::Success) {
    throw numerical_error("oracle: eigendecomposition failed");
  }
  if (!(eig.eigenvalues()(0) > 0.0)) {
    throw numerical_error("oracle: covariance is not positive definite");
  }
  return {eig.eigenvalues(), eig.eigenvectors()};
}

double trace_power(const EigenSystem& es, double exponent) {
  return es.lambda.array().pow(exponent).sum();
}

// mu' Sigma^exponent mu through the eigenbasis
double quad_power(const EigenSystem& es, const Eigen::VectorXd& mu,
                  double exponent) {
  const Eigen::VectorXd proj = es.vectors.transpose() * mu;
  return (proj.array().square() * es.lambda.array().pow(exponent)).sum();
}

double power_at(const EigenSystem& es, const Eigen::VectorXd& mu,
                Eigen::Index n, double eta, double alpha) {
  const double dn = static_cast<double>(n);
  const double sigma0_sq = 2.0 * trace_power(es, 2.0 + 4.0 * eta);
  const double sigma_sq = sigma0_sq + 4.0 * dn * quad_power(es, mu, 1.0 + 4.0 * eta);
  const double sigma0 = std::sqrt(sigma0_sq);
  const double sigma = std::sqrt(sigma_sq);
  const double shift = dn * quad_power(es, mu, 2.0 * eta);
  const double z_alpha = normal_upper_quantile(alpha);
  return normal_cdf(-z_alpha * sigma0 / sigma + shift / sigma);
}

}  // namespace

double oracle_statistic(const DataMatrix& x, const OracleSpec& spec) {
  if (x.p() != spec.sigma.dim()) {
    throw input_error("oracle_statistic: dimension mismatch");
  }
  const SymmetricMatrix transform = matrix_power(spec.sigma, 2.0 * spec.eta);
  const Eigen::VectorXd xbar = x.column_means();
  return static_cast<double>(x.n()) * xbar.dot(transform.values() * xbar);
}

double oracle_snr(const OracleSpec& spec) {
  if (spec.mu.size() != spec.sigma.dim()) {
    throw input_error("oracle_snr: dimension mismatch");
  }
  const EigenSystem es = decompose(spec.sigma);
  const double dn = static_cast<double>(spec.n);
  const double numerator = dn * quad_power(es, spec.mu, 2.0 * spec.eta);
  const double denominator =
      std::sqrt(2.0 * trace_power(es, 2.0 + 4.0 * spec.eta) +
                4.0 * dn * quad_power(es, spec.mu, 1.0 + 4.0 * spec.eta));
  return numerator / denominator;
}

double oracle_power(const OracleSpec& spec) {
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) {
    throw input_error("oracle_power: alpha must lie in (0, 1)");
  }
  if (spec.mu.size() != spec.sigma.dim()) {
    throw input_error("oracle_power: dimension mismatch");
  }
  const EigenSystem es = decompose(spec.sigma);
  return power_at(es, spec.mu, spec.n, spec.eta, spec.alpha);
}

SpectralSummary spectral_summary(const SymmetricMatrix& sigma) {
  const EigenSystem es = decompose(sigma);
  const Eigen::Index p = es.lambda.size();

  SpectralSummary out;
  out.eigenvalues = es.lambda;
  out.eigenvectors = es.vectors;
  out.lambda_bar_sq = es.lambda.array().square().mean();
  out.lambda_tilde_sq = es.lambda.array().square().inverse().mean();

  const double lambda_bar = std::sqrt(out.lambda_bar_sq);
  const double lambda_tilde_inv = 1.0 / std::sqrt(out.lambda_tilde_sq);
  const double lower_cut = std::min(lambda_bar, lambda_tilde_inv);
  const double upper_cut = std::max(lambda_bar, lambda_tilde_inv);

  out.m1 = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (es.lambda(j) <= lower_cut) out.m1 = j + 1;
  }
  out.m2 = p + 1;
  for (Eigen::Index j = p - 1; j >= 0; --j) {
    if (es.lambda(j) >= upper_cut) out.m2 = j + 1;
  }
  return out;
}

Prop3Report proposition3_check(const SymmetricMatrix& sigma,
                               const Eigen::VectorXd& mu, Eigen::Index n,
                               double alpha, EigenBlock block) {
  if (mu.size() != sigma.dim()) {
    throw input_error("proposition3_check: dimension mismatch");
  }
  const SpectralSummary ss = spectral_summary(sigma);
  const Eigen::Index p = ss.eigenvalues.size();

  Eigen::Index begin;
  Eigen::Index count;
  if (block == EigenBlock::bottom) {
    begin = 0;
    count = ss.m1;
  } else {
    begin = ss.m2 - 1;
    count = p - ss.m2 + 1;
  }
  if (count <= 0) {
    throw input_error("proposition3_check: the designated eigen-block is empty");
  }

  const auto basis = ss.eigenvectors.middleCols(begin, count);
  const Eigen::VectorXd projected = basis * (basis.transpose() * mu);
  const double mu_norm = mu.norm();
  Prop3Report report;
  report.projection_residual =
      (mu - projected).norm() / std::max(mu_norm, 1e-300);
  if (mu_norm > 0.0 && report.projection_residual >= 1e-8) {
    throw input_error(
        "proposition3_check: mu lies outside the designated eigen-block "
        "(relative residual " +
        std::to_string(report.projection_residual) + ")");
  }

  const EigenSystem es{ss.eigenvalues, ss.eigenvectors};
  const double dn = static_cast<double>(n);
  report.local_condition_ok = true;
  for (std::size_t i = 0; i < report.etas.size(); ++i) {
    const double eta = report.etas[i];
    report.local_ratio[i] = dn * quad_power(es, mu, 1.0 + 4.0 * eta) /
                            trace_power(es, 2.0 + 4.0 * eta);
    if (!(report.local_ratio[i] < 0.1)) report.local_condition_ok = false;
    report.beta[i] = power_at(es, mu, n, eta, alpha);
  }

  if (block == EigenBlock::bottom) {
    report.ordering_holds =
        report.beta[0] >= report.beta[1] && report.beta[1] >= report.beta[2];
  } else {
    report.ordering_holds =
        report.beta[0] <= report.beta[1] && report.beta[1] <= report.beta[2];
  }
  return report;
}

}  // namespace nat2
