// nat2: Neighborhood-Assisted T^2 tests for high-dimensional means.
//
// Subcommands: test (one-sample), test2 (two-sample), simulate (Monte Carlo
// size/power cells), groups (batch gene-set style testing with Bonferroni
// control). Exit codes: 0 success, 2 input error, 3 numerical failure.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nat2/cli.hpp"
#include "nat2/errors.hpp"

namespace {

constexpr int kExitInputError = 2;
constexpr int kExitNumericalError = 3;

std::optional<int> parse_k(const std::string& raw) {
  if (raw == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const int k = std::stoi(raw, &used);
    if (used != raw.size() || k < 0) throw std::invalid_argument(raw);
    return k;
  } catch (...) {
    throw nat2::input_error("--k expects 'auto' or a non-negative integer, got '" +
                            raw + "'");
  }
}

nat2::cli::OutputFormat parse_format(const std::string& raw) {
  if (raw == "json") return nat2::cli::OutputFormat::json;
  if (raw == "csv") return nat2::cli::OutputFormat::csv;
  throw nat2::input_error("--out expects 'json' or 'csv', got '" + raw + "'");
}

nat2::Placement parse_placement(const std::string& raw) {
  if (raw == "random") return nat2::Placement::random;
  if (raw == "clustered") return nat2::Placement::clustered;
  throw nat2::input_error("--placement expects 'random' or 'clustered', got '" +
                          raw + "'");
}

nat2::Innovation parse_innovation(const std::string& raw) {
  if (raw == "gaussian") return nat2::Innovation::gaussian;
  if (raw == "gamma" || raw == "centered-gamma") {
    return nat2::Innovation::centered_gamma;
  }
  if (raw == "t" || raw == "scaled-t") return nat2::Innovation::scaled_t;
  throw nat2::input_error(
      "--innovation expects 'gaussian', 'gamma' or 't', got '" + raw + "'");
}

nat2::cli::PairedLayout parse_paired(const std::string& raw) {
  if (raw == "interleaved") return nat2::cli::PairedLayout::interleaved;
  if (raw == "blocks") return nat2::cli::PairedLayout::blocks;
  throw nat2::input_error("--paired-diff expects 'interleaved' or 'blocks', got '" +
                          raw + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neighborhood-Assisted T^2 test for high-dimensional means"};
  app.require_subcommand(1);

  // test
  auto* test = app.add_subcommand("test", "One-sample test on a CSV matrix");
  std::string test_input;
  std::string test_k = "auto";
  std::string test_out = "json";
  nat2::cli::TestOptions test_opt;
  test->add_option("input", test_input, "CSV file, rows = samples")->required();
  test->add_option("--k", test_k, "Band width: 'auto' or an integer");
  test->add_option("--alpha", test_opt.alpha, "Significance level");
  test->add_option("--H", test_opt.parts, "Stability selection folds");
  test->add_option("--seed", test_opt.seed, "Selection fold seed");
  test->add_option("--out", test_out, "Output format: json or csv");
  test->add_flag("--force-k", test_opt.force_k, "Lift the k <= n/10 guard");

  // test2
  auto* test2 = app.add_subcommand("test2", "Two-sample test on two CSV matrices");
  std::string test2_k = "auto";
  std::string test2_out = "json";
  nat2::cli::Test2Options test2_opt;
  test2->add_option("--x", test2_opt.x_path, "First sample CSV")->required();
  test2->add_option("--y", test2_opt.y_path, "Second sample CSV")->required();
  test2->add_option("--k", test2_k, "Band width: 'auto' or an integer");
  test2->add_option("--alpha", test2_opt.alpha, "Significance level");
  test2->add_option("--H", test2_opt.parts, "Stability selection folds");
  test2->add_option("--seed", test2_opt.seed, "Selection fold seed");
  test2->add_option("--out", test2_out, "Output format: json or csv");
  test2->add_flag("--force-k", test2_opt.force_k, "Lift the k <= n/10 guard");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo size/power cell");
  std::string sim_model = "a";
  std::string sim_k = "auto";
  std::string sim_placement = "random";
  std::string sim_innovation = "gaussian";
  nat2::cli::SimulateOptions sim_opt;
  long long sim_n = 60;
  long long sim_p = 200;
  simulate->add_option("--model", sim_model, "Covariance model: a, b, c or d");
  simulate->add_option("--n", sim_n, "Sample size");
  simulate->add_option("--p", sim_p, "Dimension");
  simulate->add_option("--beta", sim_opt.beta, "Signal sparsity exponent");
  simulate->add_option("--r", sim_opt.r, "Signal magnitude (0 for the null)");
  simulate->add_option("--placement", sim_placement, "random or clustered");
  simulate->add_option("--reps", sim_opt.reps, "Replications");
  simulate->add_option("--k", sim_k, "Band width: 'auto' or an integer");
  simulate->add_option("--innovation", sim_innovation, "gaussian, gamma or t");
  simulate->add_option("--seed", sim_opt.seed, "Replication seed");
  simulate->add_option("--alpha", sim_opt.alpha, "Significance level");
  simulate->add_option("--out", sim_opt.out_path, "Output CSV path (default stdout)");
  simulate->add_flag("--force-k", sim_opt.force_k, "Lift the k <= n/10 guard");

  // groups
  auto* groups = app.add_subcommand("groups",
                                    "Grouped-column batch testing (Bonferroni)");
  std::string groups_k = "auto";
  std::string groups_paired;
  nat2::cli::GroupsOptions groups_opt;
  groups->add_option("--input", groups_opt.input_path,
                     "CSV matrix with a header row")->required();
  groups->add_option("--groups", groups_opt.groups_path,
                     "Groups file: name TAB column TAB column ...")->required();
  groups->add_option("--paired-diff", groups_paired,
                     "Pre/post layout: interleaved or blocks");
  groups->add_option("--alpha", groups_opt.alpha, "Family-wise error level");
  groups->add_option("--correction", groups_opt.correction,
                     "Multiplicity correction (bonferroni)");
  groups->add_option("--min-group-size", groups_opt.min_group_size,
                     "Minimum columns per group");
  groups->add_option("--k", groups_k, "Band width: 'auto' or an integer");
  groups->add_option("--H", groups_opt.parts, "Stability selection folds");
  groups->add_option("--seed", groups_opt.seed, "Selection fold seed");
  groups->add_flag("--force-k", groups_opt.force_k, "Lift the k <= n/10 guard");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  try {
    if (test->parsed()) {
      test_opt.input_path = test_input;
      test_opt.k = parse_k(test_k);
      test_opt.format = parse_format(test_out);
      nat2::cli::cmd_test(test_opt, std::cout);
    } else if (test2->parsed()) {
      test2_opt.k = parse_k(test2_k);
      test2_opt.format = parse_format(test2_out);
      nat2::cli::cmd_test2(test2_opt, std::cout);
    } else if (simulate->parsed()) {
      if (sim_model.size() != 1) {
        throw nat2::input_error("--model expects a single letter a, b, c or d");
      }
      sim_opt.model = sim_model[0];
      sim_opt.n = sim_n;
      sim_opt.p = sim_p;
      sim_opt.k = parse_k(sim_k);
      sim_opt.placement = parse_placement(sim_placement);
      sim_opt.innovation = parse_innovation(sim_innovation);
      nat2::cli::cmd_simulate(sim_opt, std::cout);
    } else if (groups->parsed()) {
      groups_opt.k = parse_k(groups_k);
      if (!groups_paired.empty()) {
        groups_opt.paired = parse_paired(groups_paired);
      }
      nat2::cli::cmd_groups(groups_opt, std::cout);
    }
  } catch (const nat2::input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const nat2::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumericalError;
  }
  return 0;
}
