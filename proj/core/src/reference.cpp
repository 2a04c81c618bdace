#include "qmqfc/reference.hpp"

#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace qmqfc::reference {

namespace detail {
extern const std::string_view kReferenceIni;
}

namespace {

namespace pt = boost::property_tree;

const pt::ptree& tree() {
  static const pt::ptree parsed = [] {
    std::istringstream in{std::string(detail::kReferenceIni)};
    pt::ptree t;
    pt::read_ini(in, t);
    return t;
  }();
  return parsed;
}

double lookup(const std::string& section, const std::string& key) {
  const auto sec = tree().get_child_optional(pt::ptree::path_type(section, '\0'));
  if (!sec) throw std::out_of_range("reference section '" + section + "' missing");
  const auto v = sec->get_optional<double>(pt::ptree::path_type(key, '\0'));
  if (!v) throw std::out_of_range("reference value '" + section + "." + key + "' missing");
  return *v;
}

}  // namespace

std::string_view ini_text() { return detail::kReferenceIni; }

double value(const std::string& dotted_key) {
  const auto dot = dotted_key.rfind('.');
  if (dot == std::string::npos) throw std::out_of_range("reference key needs section.key");
  return lookup(dotted_key.substr(0, dot), dotted_key.substr(dot + 1));
}

std::vector<Table1Row> table1() {
  std::vector<Table1Row> rows;
  for (int i = 1;; ++i) {
    const std::string section = "table1.row" + std::to_string(i);
    if (!tree().get_child_optional(pt::ptree::path_type(section, '\0'))) break;
    Table1Row row;
    row.write_power = lookup(section, "write_power");
    row.p_cwr = lookup(section, "p_cwr");
    row.g2_cwr = {lookup(section, "g2_cwr"), lookup(section, "g2_cwr_sigma")};
    row.g2_cwcw = {lookup(section, "g2_cwcw"), lookup(section, "g2_cwcw_sigma")};
    row.g2_rr = {lookup(section, "g2_rr"), lookup(section, "g2_rr_sigma")};
    row.R = {lookup(section, "R"), lookup(section, "R_sigma")};
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qmqfc::reference
