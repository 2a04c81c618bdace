#include "qmqfc/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "qmqfc/errors.hpp"

namespace qmqfc {

namespace {

bool parse_double(std::string_view text, double& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // drop the sign of -0
  return fmt::format("{:.9g}", value);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw std::invalid_argument("CSV row width does not match the header");
  }
  rows_.push_back(std::move(cells));
}

void CsvTable::add_numbers(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  add_row(std::move(cells));
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  throw std::out_of_range("no CSV column '" + std::string(name) + "'");
}

std::string CsvTable::str() const {
  std::string out;
  const auto append = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  append(header_);
  for (const auto& r : rows_) append(r);
  return out;
}

std::vector<DataPoint> read_points_csv(std::istream& in) {
  std::vector<DataPoint> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    const auto cells = split(line);
    double values[3];
    bool ok = cells.size() == 3;
    for (std::size_t i = 0; ok && i < 3; ++i) ok = parse_double(cells[i], values[i]);
    if (!ok) {
      if (points.empty() && line_no == 1) continue;  // header
      throw ConfigError(fmt::format("line {}: expected three numeric columns x,y,sigma", line_no));
    }
    points.push_back({values[0], values[1], values[2]});
  }
  return points;
}

std::string fit_result_report(const FitResult& fit) {
  std::string out = "parameter,value,sigma\n";
  for (const auto& p : fit.parameters) {
    out += fmt::format("{},{},{}\n", p.name, format_number(p.value), format_number(p.sigma));
  }
  out += fmt::format("chi2,{},\n", format_number(fit.chi2));
  out += fmt::format("dof,{},\n", fit.dof);
  out += fmt::format("converged,{},\n", fit.converged ? "true" : "false");
  out += fmt::format("iterations,{},\n", fit.iterations);
  if (!fit.diagnostics.empty()) out += fmt::format("# {}\n", fit.diagnostics);
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace qmqfc
