#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qmqfc::reference {

struct Measured {
  double value = 0.0;
  double sigma = 0.0;
};

struct Table1Row {
  double write_power = 0.0;  ///< W
  double p_cwr = 0.0;        ///< per trial
  Measured g2_cwr;
  Measured g2_cwcw;
  Measured g2_rr;
  Measured R;  ///< as quoted, i.e. rounded
};

/// Raw text of the embedded reference-value file.
std::string_view ini_text();

/// Value stored under "section.key"; throws std::out_of_range when missing.
double value(const std::string& dotted_key);

std::vector<Table1Row> table1();

}  // namespace qmqfc::reference
