#include "nat2/simgen.hpp"

#include <cmath>
#include <utility>

#include "nat2/csv.hpp"
#include "nat2/errors.hpp"
#include "nat2/natest.hpp"
#include "nat2/normal.hpp"
#include "nat2/parallel.hpp"
#include "nat2/rng.hpp"

namespace nat2 {

namespace {

constexpr std::uint64_t kPlacementStream = 0x516a17ull;
constexpr std::uint64_t kSelectionStream = 0x5e1ec7ull;

double draw_innovation(Rng& rng, Innovation kind, double t_df) {
  switch (kind) {
    case Innovation::gaussian:
      return rng.normal();
    case Innovation::centered_gamma:
      // Gamma(4, 1) standardized to mean 0, variance 1
      return (rng.gamma(4.0) - 4.0) / 2.0;
    case Innovation::scaled_t:
      return rng.student_t(t_df) * std::sqrt((t_df - 2.0) / t_df);
  }
  throw input_error("unknown innovation kind");
}

Eigen::VectorXd signal_with_stream(const SignalSpec& spec, Eigen::Index p,
                                   std::uint64_t stream) {
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
  if (spec.r == 0.0) return mu;
  const Eigen::Index count = signal_support_size(spec.beta, p);
  if (spec.placement == Placement::clustered) {
    mu.head(count).setConstant(spec.r);
  } else {
    Rng rng(mix_seed(spec.seed, stream));
    for (int idx : sample_without_replacement(static_cast<int>(p),
                                              static_cast<int>(count), rng)) {
      mu(idx) = spec.r;
    }
  }
  return mu;
}

std::string placement_label(Placement placement) {
  return placement == Placement::random ? "random" : "clustered";
}

std::string innovation_label(Innovation innovation) {
  switch (innovation) {
    case Innovation::gaussian: return "gaussian";
    case Innovation::centered_gamma: return "centered_gamma";
    case Innovation::scaled_t: return "scaled_t";
  }
  return "?";
}

std::string k_policy_label(const std::variant<int, SelectionConfig>& policy) {
  if (std::holds_alternative<int>(policy)) {
    return std::to_string(std::get<int>(policy));
  }
  return "auto";
}

}  // namespace

Eigen::Index signal_support_size(double beta, Eigen::Index p) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw input_error("signal_support_size: beta must lie in (0, 1)");
  }
  const double raw = std::pow(static_cast<double>(p), 1.0 - beta);
  return static_cast<Eigen::Index>(std::floor(raw + 1e-9));
}

Eigen::VectorXd make_signal(const SignalSpec& spec, Eigen::Index p) {
  return signal_with_stream(spec, p, kPlacementStream);
}

ScenarioSampler::ScenarioSampler(const ScenarioConfig& cfg)
    : cfg_(cfg), sigma_(materialize(cfg.model, cfg.p)) {
  if (cfg.n < 2) {
    throw input_error("ScenarioSampler: need n >= 2");
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(sigma_.values());
  if (llt.info() != Eigen::Success) {
    throw numerical_error("ScenarioSampler: covariance Cholesky failed");
  }
  chol_lower_ = llt.matrixL();
  fixed_mu_ = make_signal(cfg.signal, cfg.p);
}

Eigen::VectorXd ScenarioSampler::mu(int rep_index) const {
  if (cfg_.redraw_placement && cfg_.signal.placement == Placement::random) {
    return signal_with_stream(cfg_.signal, cfg_.p,
                              mix_seed(kPlacementStream, static_cast<std::uint64_t>(rep_index)));
  }
  return fixed_mu_;
}

DataMatrix ScenarioSampler::sample(int rep_index) const {
  Rng rng(mix_seed(cfg_.seed, static_cast<std::uint64_t>(rep_index)));
  Eigen::MatrixXd innovations(cfg_.n, cfg_.p);
  for (Eigen::Index i = 0; i < cfg_.n; ++i) {
    for (Eigen::Index j = 0; j < cfg_.p; ++j) {
      innovations(i, j) = draw_innovation(rng, cfg_.innovation, cfg_.t_df);
    }
  }
  Eigen::MatrixXd x = innovations * chol_lower_.transpose();
  x.rowwise() += mu(rep_index).transpose();
  return DataMatrix(std::move(x));
}

DataMatrix sample_dataset(const ScenarioConfig& cfg, int rep_index) {
  return ScenarioSampler(cfg).sample(rep_index);
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  if (cfg.reps < 1) {
    throw input_error("run_scenario: reps must be >= 1");
  }
  const ScenarioSampler sampler(cfg);

  // Oracle test at eta = -1/2: reject when n xbar' Sigma^{-1} xbar exceeds
  // z_alpha sqrt(2p) + p.
  Eigen::LLT<Eigen::MatrixXd> sigma_llt;
  double oracle_cut = 0.0;
  if (cfg.run_oracle) {
    sigma_llt.compute(sampler.sigma().values());
    const double dp = static_cast<double>(cfg.p);
    oracle_cut = normal_upper_quantile(cfg.alpha) * std::sqrt(2.0 * dp) + dp;
  }

  struct RepOutcome {
    bool failed = false;
    bool new_reject = false;
    bool oracle_reject = false;
    bool diagonal_reject = false;
    double z = 0.0;
    int used_k = 0;
  };
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(cfg.reps));

  const RunOptions harness_opts{.force_k = true};
  parallel_for(cfg.reps, [&](std::int64_t rep) {
    RepOutcome& out = outcomes[static_cast<std::size_t>(rep)];
    try {
      const DataMatrix x = sampler.sample(static_cast<int>(rep));

      TestReport report;
      if (std::holds_alternative<int>(cfg.k_policy)) {
        report = run_test(x, std::get<int>(cfg.k_policy), cfg.alpha, harness_opts);
      } else {
        SelectionConfig sel = std::get<SelectionConfig>(cfg.k_policy);
        sel.seed = mix_seed(sel.seed, mix_seed(kSelectionStream,
                                               static_cast<std::uint64_t>(rep)));
        report = run_test_auto(x, sel, cfg.alpha, harness_opts);
      }
      out.new_reject = report.reject;
      out.z = report.z_score;
      out.used_k = report.k;

      if (cfg.run_oracle) {
        const Eigen::VectorXd xbar = x.column_means();
        const double stat = static_cast<double>(cfg.n) *
                            xbar.dot(sigma_llt.solve(xbar));
        out.oracle_reject = stat >= oracle_cut;
      }
      if (cfg.run_diagonal) {
        const TestReport diag = run_test(x, 0, cfg.alpha, harness_opts);
        out.diagonal_reject = diag.reject;
      }
    } catch (const numerical_error&) {
      out.failed = true;
    }
  });

  ScenarioResult result;
  int good = 0;
  int new_hits = 0;
  int oracle_hits = 0;
  int diagonal_hits = 0;
  for (const RepOutcome& out : outcomes) {
    if (out.failed) {
      ++result.failures;
      continue;
    }
    ++good;
    new_hits += out.new_reject ? 1 : 0;
    oracle_hits += out.oracle_reject ? 1 : 0;
    diagonal_hits += out.diagonal_reject ? 1 : 0;
    result.new_z_scores.push_back(out.z);
    result.new_chosen_k.push_back(out.used_k);
  }
  result.reps = good;
  if (good == 0) {
    throw numerical_error("run_scenario: every replicate failed");
  }
  const auto rate_of = [good](int hits) {
    const double rate = static_cast<double>(hits) / good;
    return VariantRate{"", rate, std::sqrt(rate * (1.0 - rate) / good)};
  };
  VariantRate new_rate = rate_of(new_hits);
  new_rate.name = "new";
  result.variants.push_back(new_rate);
  if (cfg.run_oracle) {
    VariantRate o = rate_of(oracle_hits);
    o.name = "oracle";
    result.variants.push_back(o);
  }
  if (cfg.run_diagonal) {
    VariantRate d = rate_of(diagonal_hits);
    d.name = "diagonal";
    result.variants.push_back(d);
  }
  return result;
}

std::vector<PowerCurveRow> power_curve(const std::vector<ScenarioConfig>& grid) {
  std::vector<PowerCurveRow> rows;
  rows.reserve(grid.size());
  for (const ScenarioConfig& cfg : grid) {
    rows.push_back({cfg, run_scenario(cfg)});
  }
  return rows;
}

std::string scenario_csv_header() {
  return "model,n,p,beta,r,placement,innovation,k_policy,variant,"
         "rejection_rate,mc_se,reps,failures\r\n";
}

void append_scenario_csv(std::string& out, const ScenarioConfig& cfg,
                         const ScenarioResult& result) {
  for (const VariantRate& variant : result.variants) {
    out += csv_field(model_label(cfg.model));
    out += ',';
    out += std::to_string(cfg.n);
    out += ',';
    out += std::to_string(cfg.p);
    out += ',';
    out += format_double(cfg.signal.beta);
    out += ',';
    out += format_double(cfg.signal.r);
    out += ',';
    out += placement_label(cfg.signal.placement);
    out += ',';
    out += innovation_label(cfg.innovation);
    out += ',';
    out += k_policy_label(cfg.k_policy);
    out += ',';
    out += variant.name;
    out += ',';
    out += format_double(variant.rejection_rate);
    out += ',';
    out += format_double(variant.mc_se);
    out += ',';
    out += std::to_string(result.reps);
    out += ',';
    out += std::to_string(result.failures);
    out += "\r\n";
  }
}

std::string power_curve_to_csv(const std::vector<PowerCurveRow>& rows) {
  std::string out = scenario_csv_header();
  for (const PowerCurveRow& row : rows) {
    append_scenario_csv(out, row.config, row.result);
  }
  return out;
}

}  // namespace nat2
