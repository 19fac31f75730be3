#include "nat2/cli.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

#include "nat2/errors.hpp"
#include "nat2/parallel.hpp"
#include "nat2/rng.hpp"
#include "nat2/twosample.hpp"

namespace nat2::cli {

namespace {

using nlohmann::json;

json selection_to_json(const SelectionResult& sel) {
  json j;
  j["chosen_k"] = sel.chosen_k;
  j["per_fold_k"] = sel.per_fold_k;
  std::vector<std::vector<double>> snr(static_cast<std::size_t>(sel.per_k_snr.rows()));
  for (Eigen::Index h = 0; h < sel.per_k_snr.rows(); ++h) {
    snr[static_cast<std::size_t>(h)].assign(
        sel.per_k_snr.row(h).begin(), sel.per_k_snr.row(h).end());
  }
  j["per_k_snr"] = snr;
  return j;
}

SelectionResult selection_from_json(const json& j) {
  SelectionResult sel;
  sel.chosen_k = j.at("chosen_k").get<int>();
  sel.per_fold_k = j.at("per_fold_k").get<std::vector<int>>();
  const auto rows = j.at("per_k_snr").get<std::vector<std::vector<double>>>();
  if (!rows.empty()) {
    sel.per_k_snr.resize(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t h = 0; h < rows.size(); ++h) {
      for (std::size_t k = 0; k < rows[h].size(); ++k) {
        sel.per_k_snr(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(k)) =
            rows[h][k];
      }
    }
  }
  return sel;
}

DataMatrix matrix_from_file(const std::string& path) {
  return DataMatrix(read_csv_matrix_file(path).values);
}

TestReport run_pipeline(const DataMatrix& x, const std::optional<int>& k,
                        double alpha, int parts, std::uint64_t seed,
                        bool force_k) {
  const RunOptions opts{.force_k = force_k};
  if (k.has_value()) {
    return run_test(x, *k, alpha, opts);
  }
  SelectionConfig cfg;
  cfg.parts = parts;
  cfg.seed = seed;
  return run_test_auto(x, cfg, alpha, opts);
}

void emit_report(const TestReport& report, OutputFormat format,
                 std::ostream& out) {
  if (format == OutputFormat::json) {
    out << report_to_json(report) << "\n";
  } else {
    out << report_to_csv(report);
  }
}

}  // namespace

std::string report_to_json(const TestReport& report) {
  json j;
  j["statistic"] = report.statistic;
  j["centering"] = report.centering;
  j["sigma_hat"] = report.sigma_hat;
  j["z_score"] = report.z_score;
  j["p_value"] = report.p_value;
  j["k"] = report.k;
  j["alpha"] = report.alpha;
  j["reject"] = report.reject;
  j["n"] = report.n;
  j["p"] = report.p;
  j["swapped_samples"] = report.swapped_samples;
  if (report.selection.has_value()) {
    j["selection"] = selection_to_json(*report.selection);
  }
  return j.dump();
}

TestReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw input_error(std::string("report_from_json: ") + e.what());
  }
  TestReport report;
  report.statistic = j.at("statistic").get<double>();
  report.centering = j.at("centering").get<double>();
  report.sigma_hat = j.at("sigma_hat").get<double>();
  report.z_score = j.at("z_score").get<double>();
  report.p_value = j.at("p_value").get<double>();
  report.k = j.at("k").get<int>();
  report.alpha = j.at("alpha").get<double>();
  report.reject = j.at("reject").get<bool>();
  report.n = j.at("n").get<Eigen::Index>();
  report.p = j.at("p").get<Eigen::Index>();
  report.swapped_samples = j.at("swapped_samples").get<bool>();
  if (j.contains("selection")) {
    report.selection = selection_from_json(j.at("selection"));
  }
  return report;
}

std::string report_to_csv(const TestReport& report) {
  std::string out =
      "statistic,centering,sigma_hat,z_score,p_value,k,alpha,reject,n,p,"
      "swapped_samples\r\n";
  out += format_double(report.statistic);
  out += ',';
  out += format_double(report.centering);
  out += ',';
  out += format_double(report.sigma_hat);
  out += ',';
  out += format_double(report.z_score);
  out += ',';
  out += format_double(report.p_value);
  out += ',';
  out += std::to_string(report.k);
  out += ',';
  out += format_double(report.alpha);
  out += ',';
  out += report.reject ? "true" : "false";
  out += ',';
  out += std::to_string(report.n);
  out += ',';
  out += std::to_string(report.p);
  out += ',';
  out += report.swapped_samples ? "true" : "false";
  out += "\r\n";
  return out;
}

std::vector<ColumnGroup> parse_groups_file(std::istream& in,
                                           const std::string& source) {
  std::vector<ColumnGroup> groups;
  std::map<std::string, std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ColumnGroup group;
    std::size_t pos = 0;
    bool first = true;
    while (pos <= line.size()) {
      const std::size_t tab = line.find('\t', pos);
      const std::string field =
          line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos);
      if (first) {
        group.name = field;
        first = false;
      } else if (!field.empty()) {
        group.columns.push_back(field);
      }
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (group.name.empty()) {
      throw input_error(source + ": line " + std::to_string(line_no) +
                        ": missing group name");
    }
    if (seen.count(group.name)) {
      throw input_error(source + ": duplicate group name '" + group.name +
                        "' at line " + std::to_string(line_no));
    }
    seen[group.name] = line_no;
    groups.push_back(std::move(group));
  }
  if (groups.empty()) {
    throw input_error(source + ": no groups defined");
  }
  return groups;
}

Eigen::MatrixXd paired_difference(const Eigen::MatrixXd& raw,
                                  PairedLayout layout) {
  if (layout == PairedLayout::none) return raw;
  const Eigen::Index rows = raw.rows();
  if (rows % 2 != 0) {
    throw input_error("paired difference: input must have an even number of rows");
  }
  const Eigen::Index n = rows / 2;
  Eigen::MatrixXd diff(n, raw.cols());
  if (layout == PairedLayout::interleaved) {
    for (Eigen::Index i = 0; i < n; ++i) {
      diff.row(i) = raw.row(2 * i + 1) - raw.row(2 * i);
    }
  } else {
    diff = raw.bottomRows(n) - raw.topRows(n);
  }
  return diff;
}

BatchReport run_groups(const CsvMatrix& input,
                       const std::vector<ColumnGroup>& groups,
                       const GroupsOptions& options) {
  if (options.correction != "bonferroni") {
    throw input_error("run_groups: only the bonferroni correction is supported");
  }
  if (!input.has_header) {
    throw input_error(
        "run_groups: the input matrix needs a header row naming the columns");
  }
  std::map<std::string, Eigen::Index> column_index;
  for (std::size_t j = 0; j < input.column_names.size(); ++j) {
    column_index[input.column_names[j]] = static_cast<Eigen::Index>(j);
  }

  const Eigen::MatrixXd tested_matrix =
      paired_difference(input.values, options.paired);

  BatchReport batch;
  batch.alpha = options.alpha;
  batch.groups.resize(groups.size());

  parallel_for(static_cast<std::int64_t>(groups.size()), [&](std::int64_t g) {
    const ColumnGroup& group = groups[static_cast<std::size_t>(g)];
    GroupOutcome& outcome = batch.groups[static_cast<std::size_t>(g)];
    outcome.name = group.name;
    outcome.columns_requested = group.columns.size();

    std::vector<Eigen::Index> cols;
    cols.reserve(group.columns.size());
    for (const std::string& name : group.columns) {
      const auto it = column_index.find(name);
      if (it != column_index.end()) cols.push_back(it->second);
    }
    outcome.columns_used = cols.size();
    if (cols.empty()) {
      outcome.reason = "no group column exists in the input";
      return;
    }
    if (static_cast<int>(cols.size()) < options.min_group_size) {
      outcome.reason = "group size " + std::to_string(cols.size()) +
                       " below minimum " + std::to_string(options.min_group_size);
      return;
    }

    Eigen::MatrixXd sub(tested_matrix.rows(),
                        static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
      sub.col(static_cast<Eigen::Index>(j)) = tested_matrix.col(cols[j]);
    }
    try {
      outcome.report = run_pipeline(DataMatrix(std::move(sub)), options.k,
                                    options.alpha, options.parts,
                                    mix_seed(options.seed, static_cast<std::uint64_t>(g)),
                                    options.force_k);
      outcome.tested = true;
    } catch (const numerical_error& e) {
      outcome.reason = std::string("numerical failure: ") + e.what();
    } catch (const input_error& e) {
      outcome.reason = std::string("invalid group input: ") + e.what();
    }
  });

  std::sort(batch.groups.begin(), batch.groups.end(),
            [](const GroupOutcome& a, const GroupOutcome& b) {
              return a.name < b.name;
            });

  for (const GroupOutcome& outcome : batch.groups) {
    if (outcome.tested) ++batch.tested_count;
  }
  if (batch.tested_count == 0) {
    throw input_error("run_groups: no testable group remains after filtering");
  }
  batch.corrected_threshold = options.alpha / batch.tested_count;
  for (GroupOutcome& outcome : batch.groups) {
    if (outcome.tested) {
      outcome.significant = outcome.report.p_value <= batch.corrected_threshold;
    }
  }
  return batch;
}

std::string batch_report_to_csv(const BatchReport& report) {
  std::string out =
      "group,columns_requested,columns_used,status,reason,k,statistic,"
      "z_score,p_value,corrected_threshold,significant\r\n";
  for (const GroupOutcome& g : report.groups) {
    out += csv_field(g.name);
    out += ',';
    out += std::to_string(g.columns_requested);
    out += ',';
    out += std::to_string(g.columns_used);
    out += ',';
    if (g.tested) {
      out += "tested,,";
      out += std::to_string(g.report.k);
      out += ',';
      out += format_double(g.report.statistic);
      out += ',';
      out += format_double(g.report.z_score);
      out += ',';
      out += format_double(g.report.p_value);
      out += ',';
      out += format_double(report.corrected_threshold);
      out += ',';
      out += g.significant ? "true" : "false";
    } else {
      out += "excluded,";
      out += csv_field(g.reason);
      out += ",,,,,";
    }
    out += "\r\n";
  }
  return out;
}

void cmd_test(const TestOptions& options, std::ostream& out) {
  const DataMatrix x = matrix_from_file(options.input_path);
  const TestReport report = run_pipeline(x, options.k, options.alpha,
                                         options.parts, options.seed,
                                         options.force_k);
  emit_report(report, options.format, out);
}

void cmd_test2(const Test2Options& options, std::ostream& out) {
  TwoSampleInput input(matrix_from_file(options.x_path),
                       matrix_from_file(options.y_path));
  const RunOptions opts{.force_k = options.force_k};
  TestReport report;
  if (options.k.has_value()) {
    report = run_two_sample_test(input, *options.k, options.alpha, opts);
  } else {
    SelectionConfig cfg;
    cfg.parts = options.parts;
    cfg.seed = options.seed;
    report = run_two_sample_test_auto(input, cfg, options.alpha, opts);
  }
  emit_report(report, options.format, out);
}

void cmd_simulate(const SimulateOptions& options, std::ostream& out) {
  ScenarioConfig cfg;
  cfg.n = options.n;
  cfg.p = options.p;
  switch (options.model) {
    case 'a': cfg.model = Ar1{0.6}; break;
    case 'b': cfg.model = BlockDiag{2, 0.6, 4}; break;
    case 'c': cfg.model = RandomSparse{4, 1.0, 2.0, options.seed}; break;
    case 'd': cfg.model = EqualCorr{0.6}; break;
    default:
      throw input_error(std::string("cmd_simulate: unknown model letter '") +
                        options.model + "' (expected a, b, c or d)");
  }
  cfg.signal = SignalSpec{options.beta, options.r, options.placement,
                          mix_seed(options.seed, 0x51f7ull)};
  cfg.reps = options.reps;
  cfg.alpha = options.alpha;
  if (options.k.has_value()) {
    if (!options.force_k && *options.k > options.n / 10) {
      throw input_error(
          "cmd_simulate: k must satisfy k <= n/10 (override with --force-k)");
    }
    cfg.k_policy = *options.k;
  } else {
    SelectionConfig sel;
    sel.seed = options.seed;
    cfg.k_policy = sel;
  }
  cfg.innovation = options.innovation;
  cfg.seed = options.seed;

  const ScenarioResult result = run_scenario(cfg);
  std::string csv = scenario_csv_header();
  append_scenario_csv(csv, cfg, result);
  if (options.out_path.empty()) {
    out << csv;
  } else {
    std::ofstream file(options.out_path, std::ios::binary);
    if (!file) {
      throw input_error("cmd_simulate: cannot open output file " +
                        options.out_path);
    }
    file << csv;
  }
}

void cmd_groups(const GroupsOptions& options, std::ostream& out) {
  const CsvMatrix input = read_csv_matrix_file(options.input_path);
  std::ifstream groups_stream(options.groups_path, std::ios::binary);
  if (!groups_stream) {
    throw input_error("cmd_groups: cannot open groups file " +
                      options.groups_path);
  }
  const auto groups = parse_groups_file(groups_stream, options.groups_path);
  const BatchReport report = run_groups(input, groups, options);
  out << batch_report_to_csv(report);
}

}  // namespace nat2::cli
