#include <gtest/gtest.h>

#include <limits>
#include <sstream>

#include "qmqfc/csv.hpp"
#include "qmqfc/errors.hpp"

using namespace qmqfc;

TEST(FormatNumber, NineSignificantDigits) {
  EXPECT_EQ(format_number(452.0), "452");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(format_number(2.0 / 3.0 * 1e-7), "6.66666667e-08");
  EXPECT_EQ(format_number(123456789012.0), "1.23456789e+11");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
}

TEST(CsvTable, RendersHeaderAndRows) {
  CsvTable t({"t (s)", "g2"});
  t.add_numbers({0.0, 18.5});
  t.add_row({"1e-05", "x"});
  EXPECT_EQ(t.str(), "t (s),g2\n0,18.5\n1e-05,x\n");
  EXPECT_EQ(t.column("g2"), 1u);
  EXPECT_THROW(t.column("tau"), std::out_of_range);
  EXPECT_THROW(t.add_numbers({1.0}), std::invalid_argument);
}

TEST(ReadPoints, HeaderAndComments) {
  std::istringstream in("x,y,sigma\n# note\n1,2,0.1\n\n3,4.5,0.2\n");
  const auto pts = read_points_csv(in);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_DOUBLE_EQ(pts[1].y, 4.5);
  EXPECT_DOUBLE_EQ(pts[1].sigma, 0.2);
}

TEST(ReadPoints, MalformedRow) {
  std::istringstream in("1,2,0.1\n1,2\n");
  EXPECT_THROW(read_points_csv(in), ConfigError);
  std::istringstream bad_header("1,2,0.1\nx,y,z\n");
  EXPECT_THROW(read_points_csv(bad_header), ConfigError);
}

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(FitReport, ContainsParameters) {
  FitResult r;
  r.parameters = {{"tau", 2.36e-5, 1e-6}};
  r.chi2 = 9.5;
  r.dof = 9;
  r.converged = true;
  const auto text = fit_result_report(r);
  EXPECT_NE(text.find("tau,2.36e-05,1e-06"), std::string::npos);
  EXPECT_NE(text.find("converged,true"), std::string::npos);
}
