#pragma once

// Plain CSV tables: '#'-prefixed metadata lines, one header row, string cells.
// Numbers use the shortest form that parses back to the same double.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace mnpt {

std::string format_number(double x);
double parse_number(const std::string& s);

struct CsvTable {
  std::vector<std::string> preamble;  // comment lines before the header, without "# "
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> trailer;   // comment lines after the records, without "# "

  void add_meta(const std::string& key, const std::string& value);
  void add_meta(const std::string& key, double value) { add_meta(key, format_number(value)); }
  /// Value of a "key=value" preamble line, empty when absent.
  std::string meta(const std::string& key) const;
  std::size_t column(const std::string& name) const;  // throws IoError when missing
  std::vector<double> numeric_column(const std::string& name) const;
};

void write_csv(std::ostream& os, const CsvTable& t);
/// Writes to `path`, or to standard output for "" or "-".
void write_csv(const std::string& path, const CsvTable& t);

CsvTable read_csv(std::istream& is, const std::string& origin = "<stream>");
CsvTable read_csv(const std::string& path);

}  // namespace mnpt
