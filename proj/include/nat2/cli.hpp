#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nat2/csv.hpp"
#include "nat2/natest.hpp"
#include "nat2/simgen.hpp"

namespace nat2::cli {

enum class OutputFormat { json, csv };

/// Full-precision JSON serialization of a report; every numeric field
/// round-trips exactly through report_from_json.
std::string report_to_json(const TestReport& report);
TestReport report_from_json(const std::string& text);

/// Flat one-row CSV with the scalar report fields (selection diagnostics
/// are JSON-only).
std::string report_to_csv(const TestReport& report);

struct TestOptions {
  std::string input_path;
  std::optional<int> k;  // nullopt = stability selection
  double alpha = 0.05;
  int parts = 5;
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::json;
  bool force_k = false;
};

struct Test2Options {
  std::string x_path;
  std::string y_path;
  std::optional<int> k;
  double alpha = 0.05;
  int parts = 5;
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::json;
  bool force_k = false;
};

struct SimulateOptions {
  char model = 'a';
  Eigen::Index n = 60;
  Eigen::Index p = 200;
  double beta = 0.5;
  double r = 0.0;
  Placement placement = Placement::random;
  int reps = 1000;
  std::optional<int> k;  // nullopt = stability selection per replicate
  Innovation innovation = Innovation::gaussian;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  bool force_k = false;
  std::string out_path;  // empty = stdout
};

enum class PairedLayout { none, interleaved, blocks };

struct GroupsOptions {
  std::string input_path;
  std::string groups_path;
  PairedLayout paired = PairedLayout::none;
  double alpha = 0.05;
  std::string correction = "bonferroni";
  int min_group_size = 60;
  std::optional<int> k;  // nullopt = stability selection (default)
  int parts = 5;
  std::uint64_t seed = 0;
  bool force_k = false;
};

/// One group per line: name TAB column-name TAB column-name ...
struct ColumnGroup {
  std::string name;
  std::vector<std::string> columns;
};

std::vector<ColumnGroup> parse_groups_file(std::istream& in,
                                           const std::string& source);

struct GroupOutcome {
  std::string name;
  std::size_t columns_requested = 0;
  std::size_t columns_used = 0;
  bool tested = false;
  std::string reason;  // exclusion reason when not tested
  TestReport report;
  bool significant = false;
};

struct BatchReport {
  std::vector<GroupOutcome> groups;  // sorted by group name
  double alpha = 0.05;
  double corrected_threshold = 0.0;  // alpha / tested_count
  int tested_count = 0;
};

/// Per-group one-sample tests with Bonferroni control across the groups
/// that were actually testable. Groups run in parallel; output order is
/// by group name. Unknown columns are dropped; a group that ends up empty,
/// falls below min_group_size, or fails numerically is excluded with the
/// reason recorded.
BatchReport run_groups(const CsvMatrix& input,
                       const std::vector<ColumnGroup>& groups,
                       const GroupsOptions& options);

std::string batch_report_to_csv(const BatchReport& report);

/// Collapse a 2n-row pre/post matrix to n per-subject difference rows
/// (post minus pre), for either the interleaved or the two-block layout.
Eigen::MatrixXd paired_difference(const Eigen::MatrixXd& raw,
                                  PairedLayout layout);

// Subcommand bodies; argv parsing lives in the binary. Each throws
// input_error / numerical_error, which the binary maps to exit codes
// 2 and 3.
void cmd_test(const TestOptions& options, std::ostream& out);
void cmd_test2(const Test2Options& options, std::ostream& out);
void cmd_simulate(const SimulateOptions& options, std::ostream& out);
void cmd_groups(const GroupsOptions& options, std::ostream& out);

}  // namespace nat2::cli
