#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "qmqfc/errors.hpp"
#include "qmqfc/event_sim.hpp"
#include "qmqfc/stats.hpp"

using namespace qmqfc;

namespace {

CorrelationEstimate measured(double value, double sigma) {
  CorrelationEstimate e;
  e.value = value;
  e.sigma = sigma;
  return e;
}

}  // namespace

TEST(G2Cross, PoissonPropagation) {
  TrialCounts c;
  c.n_trials = 1'000'000;
  c.clicks_w = 1000;
  c.clicks_r = 4000;
  c.coincidences_wr = 80;
  const auto g = g2_cross(c);
  EXPECT_DOUBLE_EQ(g.value, 80.0 * 1e6 / (1000.0 * 4000.0));
  EXPECT_NEAR(g.sigma, g.value * std::sqrt(1.0 / 80 + 1.0 / 1000 + 1.0 / 4000), 1e-12);
  EXPECT_EQ(g.n_trials, 1'000'000u);
  EXPECT_EQ(g.label, EstimateLabel::g2_cross);
  EXPECT_EQ(g.flags, CorrelationEstimate::kNone);
}

TEST(G2Cross, ProbabilityFormMatchesCounts) {
  TrialCounts c;
  c.n_trials = 200000;
  c.clicks_w = 500;
  c.clicks_r = 900;
  c.coincidences_wr = 30;
  const auto a = g2_cross(c);
  const auto b = g2_cross(30.0 / 2e5, 500.0 / 2e5, 900.0 / 2e5, 200000);
  EXPECT_NEAR(a.value, b.value, 1e-12 * a.value);
  EXPECT_NEAR(a.sigma, b.sigma, 1e-12 * a.sigma);
}

TEST(G2Cross, ZeroSinglesUndefined) {
  TrialCounts c;
  c.n_trials = 100;
  c.clicks_w = 0;
  c.clicks_r = 5;
  EXPECT_THROW(g2_cross(c), UndefinedEstimate);
  EXPECT_THROW(g2_cross(0.0, 0.1, 0.1, 0), DomainError);
}

TEST(G2Cross, ZeroCoincidencesOneSided) {
  TrialCounts c;
  c.n_trials = 10000;
  c.clicks_w = 10;
  c.clicks_r = 10;
  const auto g = g2_cross(c);
  EXPECT_EQ(g.value, 0.0);
  EXPECT_TRUE(g.has(CorrelationEstimate::kOneSided));
  EXPECT_NEAR(g.sigma, 1.841 * 10000.0 / 100.0, 1e-9);
}

TEST(G2Auto, SplitArm) {
  SplitTallies s{100000, 400, 500, 4};
  const auto g = g2_auto(s, EstimateLabel::g2_auto_r);
  EXPECT_DOUBLE_EQ(g.value, 4.0 * 1e5 / (400.0 * 500.0));
  EXPECT_EQ(g.label, EstimateLabel::g2_auto_r);
}

TEST(CauchySchwarz, PublishedRowThree) {
  const auto r = cauchy_schwarz_R(measured(9.9, 0.2), measured(1.6, 0.4), measured(2.0, 0.1));
  EXPECT_NEAR(r.value, 9.9 * 9.9 / 3.2, 1e-12);
  const double rel = std::sqrt(std::pow(2 * 0.2 / 9.9, 2) + 0.25 * 0.25 + 0.05 * 0.05);
  EXPECT_NEAR(r.sigma, r.value * rel, 1e-12);
  EXPECT_NEAR(violation_significance(r), (r.value - 1.0) / r.sigma, 1e-12);
}

TEST(CauchySchwarz, ClassicalFieldsStayBelowOne) {
  // thermal twin beams at the classical boundary: g2_cross = sqrt(g2_a g2_b)
  const auto r = cauchy_schwarz_R(measured(2.0, 0.01), measured(2.0, 0.01), measured(2.0, 0.01));
  EXPECT_DOUBLE_EQ(r.value, 1.0);
  EXPECT_DOUBLE_EQ(violation_significance(r), 0.0);
}

TEST(CauchySchwarz, Errors) {
  EXPECT_THROW(cauchy_schwarz_R(measured(2, 0.1), measured(0, 0.1), measured(2, 0.1)),
               DomainError);
  EXPECT_THROW(violation_significance(measured(3.0, 0.0)), DomainError);
  const auto r = cauchy_schwarz_R(measured(0.0, 0.5), measured(2, 0.1), measured(2, 0.1));
  EXPECT_TRUE(r.has(CorrelationEstimate::kOneSided));
  EXPECT_NEAR(r.sigma, 0.25 / 4.0, 1e-15);
}

TEST(Snr, FromProbabilities) {
  const auto s = snr_from_counts(0.01, 0.0001);
  EXPECT_NEAR(s.value, 99.0, 1e-9);
  EXPECT_EQ(s.flags, CorrelationEstimate::kNone);
}

TEST(Snr, InfiniteAndNegative) {
  const auto inf = snr_from_counts(0.01, 0.0);
  EXPECT_TRUE(std::isinf(inf.value));
  EXPECT_TRUE(inf.has(CorrelationEstimate::kInfinite));
  const auto neg = snr_from_counts(0.001, 0.002);
  EXPECT_EQ(neg.value, 0.0);
  EXPECT_TRUE(neg.has(CorrelationEstimate::kNegative));
  EXPECT_THROW(snr_from_counts(1.5, 0.1), DomainError);
}

TEST(Snr, FromCountsPropagation) {
  const auto s = snr_from_counts(4530, 1'000'000, 10, 1'000'000);
  EXPECT_NEAR(s.value, 452.0, 1e-9);
  EXPECT_NEAR(s.sigma, 453.0 * std::sqrt(1.0 / 4530 + 1.0 / 10), 1e-9);
  EXPECT_THROW(snr_from_counts(1, 0, 1, 10), DomainError);
}

TEST(Visibility, PublishedPeak) {
  const auto v = max_visibility(20.0);
  EXPECT_NEAR(v.value, 19.0 / 21.0, 1e-15);
  EXPECT_TRUE(v.has(CorrelationEstimate::kBellViolationPossible));
  EXPECT_FALSE(max_visibility(3.0).has(CorrelationEstimate::kBellViolationPossible));
  EXPECT_EQ(max_visibility(1.0).value, 0.0);
  EXPECT_THROW(max_visibility(0.5), DomainError);
}

TEST(Visibility, SigmaPropagation) {
  const auto v = max_visibility(measured(9.0, 0.5));
  EXPECT_NEAR(v.sigma, 2.0 / 100.0 * 0.5, 1e-15);
}

TEST(Heralding, Bounds) {
  EXPECT_NEAR(max_heralding_efficiency(452.0).value, 452.0 / 453.0, 1e-15);
  EXPECT_EQ(max_heralding_efficiency(std::numeric_limits<double>::infinity()).value, 1.0);
  EXPECT_EQ(max_heralding_efficiency(0.0).value, 0.0);
  EXPECT_THROW(max_heralding_efficiency(-1.0), DomainError);
}

TEST(ShuffleNull, DestroyingPairingRemovesCorrelation) {
  SimulationConfig c;
  c.converted = false;
  c.params.p = 0.05;
  c.params.eta_cw = 0.2;
  c.params.eta_r = 0.2;
  c.params.eta_ret_intrinsic = 0.8;
  c.n_trials = 1'000'000;
  auto records = simulate_records(c);
  const auto paired = g2_cross(tally(records));
  EXPECT_GT(paired.value, 5.0);

  std::vector<std::uint8_t> read_bits(records.size());
  constexpr std::uint8_t kReadMask =
      TrialRecord::kRead | TrialRecord::kReadA | TrialRecord::kReadB;
  for (std::size_t i = 0; i < records.size(); ++i) read_bits[i] = records[i].bits & kReadMask;
  std::mt19937_64 rng(2024);
  std::shuffle(read_bits.begin(), read_bits.end(), rng);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].bits = static_cast<std::uint8_t>((records[i].bits & ~kReadMask) | read_bits[i]);
  }
  const auto shuffled = g2_cross(tally(records));
  EXPECT_NEAR(shuffled.value, 1.0, 4.0 * shuffled.sigma);
}

TEST(Labels, Names) {
  EXPECT_EQ(to_string(EstimateLabel::R), "R");
  EXPECT_EQ(to_string(EstimateLabel::g2_auto_w), "g2_auto_w");
}
