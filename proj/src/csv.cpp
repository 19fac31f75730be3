#include "nat2/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "nat2/errors.hpp"

namespace nat2 {

namespace {

// One logical CSV record; quoted fields may span input lines.
bool read_record(std::istream& in, std::vector<std::string>& fields,
                 std::size_t& line_no, const std::string& source) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool saw_any = false;
  const std::size_t start_line = line_no + 1;
  int c;
  while ((c = in.get()) != EOF) {
    saw_any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line_no;
        field.push_back(static_cast<char>(c));
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        break;
      case '\r':
        if (in.peek() == '\n') in.get();
        [[fallthrough]];
      case '\n':
        ++line_no;
        fields.push_back(std::move(field));
        return true;
      default:
        field.push_back(static_cast<char>(c));
    }
  }
  if (in_quotes) {
    throw input_error(source + ": unterminated quote in record starting at line " +
                      std::to_string(start_line));
  }
  if (!saw_any) return false;
  ++line_no;
  fields.push_back(std::move(field));
  return true;
}

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& raw, double& value) {
  const std::string t = trimmed(raw);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

}  // namespace

CsvMatrix read_csv_matrix(std::istream& in, const std::string& source_name) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> fields;
  std::size_t line_no = 0;

  CsvMatrix out;
  bool first_record = true;
  std::size_t width = 0;

  while (read_record(in, fields, line_no, source_name)) {
    if (fields.size() == 1 && trimmed(fields[0]).empty()) continue;  // blank line
    if (first_record) {
      width = fields.size();
      // header iff some field is not a number
      bool all_numeric = true;
      std::vector<double> parsed(fields.size());
      for (std::size_t j = 0; j < fields.size(); ++j) {
        if (!parse_number(fields[j], parsed[j])) {
          all_numeric = false;
          break;
        }
      }
      if (all_numeric) {
        rows.push_back(std::move(parsed));
      } else {
        out.has_header = true;
        out.column_names.reserve(fields.size());
        for (auto& f : fields) out.column_names.push_back(trimmed(f));
      }
      first_record = false;
      continue;
    }
    if (fields.size() != width) {
      throw input_error(source_name + ": line " + std::to_string(line_no) +
                        " has " + std::to_string(fields.size()) +
                        " fields, expected " + std::to_string(width));
    }
    std::vector<double> parsed(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (!parse_number(fields[j], parsed[j])) {
        throw input_error(source_name + ": line " + std::to_string(line_no) +
                          ", field " + std::to_string(j + 1) +
                          ": cannot parse '" + trimmed(fields[j]) +
                          "' as a number");
      }
    }
    rows.push_back(std::move(parsed));
  }

  if (first_record) {
    throw input_error(source_name + ": empty input");
  }
  if (rows.empty()) {
    throw input_error(source_name + ": no data rows after the header");
  }
  out.values.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return out;
}

CsvMatrix read_csv_matrix_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw input_error("cannot open input file: " + path);
  }
  return read_csv_matrix(in, path);
}

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\r\n") == std::string::npos) return raw;
  std::string quoted = "\"";
  for (char c : raw) {
    if (c == '"') quoted += "\"\"";
    else quoted.push_back(c);
  }
  quoted += '"';
  return quoted;
}

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

}  // namespace nat2
