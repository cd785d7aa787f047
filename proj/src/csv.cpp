#include "mnpt/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mnpt/error.hpp"

namespace mnpt {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

double parse_number(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  const char* first = s.data();
  const char* last = first + s.size();
  if (first != last && *first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) throw IoError("not a number: '" + s + "'");
  return v;
}

void CsvTable::add_meta(const std::string& key, const std::string& value) { preamble.push_back(key + "=" + value); }

std::string CsvTable::meta(const std::string& key) const {
  const std::string prefix = key + "=";
  for (const auto& line : preamble) {
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  }
  return {};
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw IoError("missing CSV column '" + name + "'");
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
  const auto c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(parse_number(r.at(c)));
  return out;
}

namespace {

void write_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void write_csv(std::ostream& os, const CsvTable& t) {
  for (const auto& m : t.preamble) os << "# " << m << '\n';
  write_row(os, t.columns);
  for (const auto& r : t.rows) write_row(os, r);
  for (const auto& m : t.trailer) os << "# " << m << '\n';
}

void write_csv(const std::string& path, const CsvTable& t) {
  if (path.empty() || path == "-") {
    write_csv(std::cout, t);
    std::cout.flush();
    return;
  }
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_csv(os, t);
  os.flush();
  if (!os) throw IoError("write to '" + path + "' failed");
}

CsvTable read_csv(std::istream& is, const std::string& origin) {
  CsvTable t;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      if (!body.empty() && body[0] == ' ') body.erase(0, 1);
      (header ? t.trailer : t.preamble).push_back(body);
      continue;
    }
    auto cells = split(line);
    if (!header) {
      t.columns = std::move(cells);
      header = true;
      continue;
    }
    if (cells.size() != t.columns.size()) {
      throw IoError(origin + ": row " + std::to_string(t.rows.size() + 1) + " has " + std::to_string(cells.size()) +
                    " cells, header has " + std::to_string(t.columns.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (!header) throw IoError(origin + ": no header row");
  return t;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  return read_csv(is, path);
}

}  // namespace mnpt
