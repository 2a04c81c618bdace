#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <set>

#include "qmqfc/rng.hpp"

using namespace qmqfc;

TEST(CounterStream, SameKeySameSequence) {
  CounterStream a(7, 42, 3);
  CounterStream b(7, 42, 3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(CounterStream, KeysAreIndependent) {
  std::set<std::uint64_t> first;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    for (std::uint64_t index = 0; index < 64; ++index) {
      for (std::uint64_t domain = 0; domain < 4; ++domain) {
        first.insert(CounterStream(seed, index, domain)());
      }
    }
  }
  EXPECT_EQ(first.size(), 4u * 64u * 4u);
}

TEST(CounterStream, UniformInHalfOpenInterval) {
  CounterStream s(1, 0);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform_open_closed();
    ASSERT_GT(u, 0.0);
    ASSERT_LE(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(BernoulliThreshold, Edges) {
  EXPECT_EQ(bernoulli_threshold(0.0), 0u);
  EXPECT_EQ(bernoulli_threshold(-1.0), 0u);
  EXPECT_EQ(bernoulli_threshold(std::nan("")), 0u);
  EXPECT_EQ(bernoulli_threshold(1.0), std::numeric_limits<std::uint64_t>::max());
  EXPECT_EQ(bernoulli_threshold(0.5), std::uint64_t{1} << 63);
  EXPECT_EQ(bernoulli_threshold(std::nextafter(1.0, 0.0)),
            std::numeric_limits<std::uint64_t>::max() - 2047);
}

TEST(BernoulliThreshold, FrequencyMatchesProbability) {
  CounterStream s(99, 1);
  const auto t = bernoulli_threshold(0.3);
  const int n = 200000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += s.bernoulli(t);
  EXPECT_NEAR(static_cast<double>(hits) / n, 0.3, 5.0 * std::sqrt(0.21 / n));
}
