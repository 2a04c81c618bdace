#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qmqfc/fit.hpp"

namespace qmqfc {

/// Nine significant digits, '.' decimal; "nan"/"inf"/"-inf" for non-finite.
std::string format_number(double value);

/// Comma-separated table with a header row; cells are pre-formatted strings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  void add_numbers(const std::vector<double>& values);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::size_t column(std::string_view name) const;  ///< throws std::out_of_range

  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Reads (x, y, sigma) triples. A first line that does not parse as numbers is
/// treated as a header. Throws ConfigError on malformed rows.
std::vector<DataPoint> read_points_csv(std::istream& in);

std::string fit_result_report(const FitResult& fit);

/// 64-bit FNV-1a digest, used for config content hashes.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace qmqfc
