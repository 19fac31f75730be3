#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nat2 {

/// Numeric matrix read from CSV: rows are samples, columns are variables.
/// column_names is empty when the file had no header row.
struct CsvMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> column_names;
  bool has_header = false;
};

/// Parse a CSV stream of numbers with an auto-detected optional header row
/// (the first row is a header iff any of its fields fails numeric parsing).
/// Handles RFC 4180 quoting. Errors carry 1-based line and field positions
/// and the source name.
CsvMatrix read_csv_matrix(std::istream& in, const std::string& source_name);

CsvMatrix read_csv_matrix_file(const std::string& path);

/// Quote a field per RFC 4180 when it contains a comma, quote or newline.
std::string csv_field(const std::string& raw);

/// Shortest text that still restores the exact double (17 significant
/// digits).
std::string format_double(double v);

}  // namespace nat2
