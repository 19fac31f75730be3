#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "nat2/covariance.hpp"
#include "nat2/ksel.hpp"
#include "nat2/matrix.hpp"

namespace nat2 {

enum class Placement { random, clustered };

/// Mean-vector design: floor(p^{1-beta}) entries of magnitude r, either in
/// the leading coordinates (clustered) or at seeded positions drawn without
/// replacement (random). r = 0 gives the null mean.
struct SignalSpec {
  double beta = 0.5;
  double r = 0.0;
  Placement placement = Placement::clustered;
  std::uint64_t seed = 0;
};

/// Number of nonzero entries, floor(p^{1-beta}).
Eigen::Index signal_support_size(double beta, Eigen::Index p);

/// Materialize the mean vector. The placement stream is derived from
/// spec.seed and is independent of the noise stream, so the same mu can be
/// held fixed across replicates.
Eigen::VectorXd make_signal(const SignalSpec& spec, Eigen::Index p);

enum class Innovation { gaussian, centered_gamma, scaled_t };

/// One Monte Carlo cell: data model, signal design, test configuration and
/// replication plan. k_policy is either a fixed band width or a stability
/// selection setup applied per replicate.
struct ScenarioConfig {
  Eigen::Index n = 60;
  Eigen::Index p = 200;
  CovarianceModel model = Ar1{0.6};
  SignalSpec signal;
  int reps = 1000;
  double alpha = 0.05;
  std::variant<int, SelectionConfig> k_policy = 3;
  Innovation innovation = Innovation::gaussian;
  double t_df = 8.0;
  std::uint64_t seed = 0;
  bool redraw_placement = false;  // draw random positions afresh per replicate
  bool run_oracle = true;         // known-Sigma test at eta = -1/2
  bool run_diagonal = false;      // the k = 0 variant alongside k_policy
};

struct VariantRate {
  std::string name;
  double rejection_rate = 0.0;
  double mc_se = 0.0;
};

struct ScenarioResult {
  std::vector<VariantRate> variants;
  int reps = 0;      // successful replicates
  int failures = 0;  // replicates aborted by numerical errors (0 when healthy)
  std::vector<double> new_z_scores;  // per-replicate z of the "new" test
  std::vector<int> new_chosen_k;     // per-replicate band width actually used
};

/// Precomputes the covariance, its Cholesky factor and the signal once, then
/// draws replicate datasets deterministically from (seed, rep_index).
class ScenarioSampler {
 public:
  explicit ScenarioSampler(const ScenarioConfig& cfg);

  DataMatrix sample(int rep_index) const;
  const SymmetricMatrix& sigma() const noexcept { return sigma_; }
  Eigen::VectorXd mu(int rep_index) const;

 private:
  ScenarioConfig cfg_;
  SymmetricMatrix sigma_;
  Eigen::MatrixXd chol_lower_;
  Eigen::VectorXd fixed_mu_;
};

/// X_{rep} = mu + eps Sigma^{1/2}-transform per row, innovations i.i.d. with
/// mean 0 and unit variance. Rows are generated from the replicate's own
/// seeded stream, so results do not depend on evaluation order.
DataMatrix sample_dataset(const ScenarioConfig& cfg, int rep_index);

/// Replicated size/power experiment for the configured test variants.
/// Deterministic given cfg (including seeds), independent of worker count.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

struct PowerCurveRow {
  ScenarioConfig config;
  ScenarioResult result;
};

/// run_scenario over a grid of cells.
std::vector<PowerCurveRow> power_curve(const std::vector<ScenarioConfig>& grid);

std::string scenario_csv_header();
void append_scenario_csv(std::string& out, const ScenarioConfig& cfg,
                         const ScenarioResult& result);
std::string power_curve_to_csv(const std::vector<PowerCurveRow>& rows);

}  // namespace nat2
