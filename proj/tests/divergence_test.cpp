#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "test_support.hpp"
#include "topicdrift/divergence.hpp"
#include "topicdrift/error.hpp"

using namespace topicdrift;

namespace {
const std::vector<double> kUniform{0.5, 0.5};
const std::vector<double> kE1{1.0, 0.0};
const std::vector<double> kE2{0.0, 1.0};
}  // namespace

TEST(Divergence, IdentityIsZeroForAllMeasures) {
  for (auto m : kAllMeasures) EXPECT_NEAR(divergence(m, kUniform, kUniform), 0.0, 1e-15) << to_string(m);
}

TEST(Divergence, DisjointSupportHandValues) {
  EXPECT_DOUBLE_EQ(divergence(Measure::chebyshev, kE1, kE2), 1.0);
  EXPECT_NEAR(divergence(Measure::euclidean, kE1, kE2), 1.414214, 1e-6);
  EXPECT_DOUBLE_EQ(divergence(Measure::squared_euclidean, kE1, kE2), 2.0);
  EXPECT_NEAR(divergence(Measure::hellinger, kE1, kE2), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(divergence(Measure::cosine, kE1, kE2), 1.0);
  EXPECT_NEAR(divergence(Measure::jensen_shannon, kE1, kE2), std::numbers::ln2, 1e-9);
}

TEST(Divergence, KullbackLeiblerHandValue) {
  EXPECT_NEAR(divergence(Measure::kullback_leibler, kUniform, std::vector<double>{0.25, 0.75}),
              0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0), 1e-12);
  EXPECT_NEAR(divergence(Measure::kullback_leibler, kUniform, std::vector<double>{0.25, 0.75}), 0.143841, 1e-6);
}

TEST(Divergence, Errors) {
  EXPECT_THROW(divergence(Measure::chebyshev, kE1, std::vector<double>{1.0, 0.0, 0.0}), ValidationError);
  EXPECT_THROW(divergence(Measure::cosine, kE1, std::vector<double>{0.0, 0.0}), ValidationError);
  EXPECT_THROW(parse_measure("bhattacharyya"), ValidationError);
  EXPECT_THROW(divergence(DivergenceMeasure{Measure::kullback_leibler, 0.0}, kE1, kE2), ValidationError);
}

TEST(Divergence, NamesRoundTrip) {
  for (auto m : kAllMeasures) EXPECT_EQ(parse_measure(to_string(m)), m);
}

TEST(Divergence, MatchesOracleAndBoundsOnRandomSimplexes) {
  Rng rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t m = 2 + rng.below(50);
    const auto p = fixtures::random_simplex(rng, m), q = fixtures::random_simplex(rng, m);
    for (auto kind : kAllMeasures) {
      const double v = divergence(kind, p, q);
      EXPECT_NEAR(v, oracle::divergence(kind, p, q), 1e-12) << to_string(kind);
      EXPECT_GE(v, 0.0);
      if (is_symmetric(kind)) EXPECT_NEAR(v, divergence(kind, q, p), 1e-12);
    }
    EXPECT_LE(divergence(Measure::chebyshev, p, q), 1.0);
    EXPECT_LE(divergence(Measure::hellinger, p, q), 1.0);
    EXPECT_LE(divergence(Measure::jensen_shannon, p, q), std::numbers::ln2 + 1e-15);
    EXPECT_LE(divergence(Measure::cosine, p, q), 1.0);
    EXPECT_NEAR(divergence(Measure::squared_euclidean, p, q), std::pow(divergence(Measure::euclidean, p, q), 2), 1e-12);
  }
}

TEST(Divergence, JensenShannonViaKullbackLeibler) {
  Rng rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = fixtures::random_simplex(rng, 10), q = fixtures::random_simplex(rng, 10);
    std::vector<double> z(10);
    for (int i = 0; i < 10; ++i) z[i] = 0.5 * (p[i] + q[i]);
    EXPECT_NEAR(divergence(Measure::jensen_shannon, p, q),
                0.5 * (divergence(Measure::kullback_leibler, p, z) + divergence(Measure::kullback_leibler, q, z)),
                1e-12);
  }
}

TEST(PairwiseMatrix, SingleRowIsZero) {
  const auto m = pairwise_matrix({Measure::hellinger}, {{0.2, 0.8}});
  ASSERT_EQ(m.rows(), 1);
  EXPECT_EQ(m(0, 0), 0.0);
}

TEST(PairwiseMatrix, SymmetricMeasuresGiveSymmetricMatrices) {
  Rng rng(5);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 8; ++i) rows.push_back(fixtures::random_simplex(rng, 6));
  for (auto kind : kAllMeasures) {
    const auto m = pairwise_matrix({kind}, rows);
    for (int i = 0; i < 8; ++i) {
      EXPECT_EQ(m(i, i), 0.0);
      for (int j = 0; j < 8; ++j) {
        EXPECT_NEAR(m(i, j), divergence(kind, rows[i], rows[j]), 1e-15);
        if (is_symmetric(kind)) EXPECT_NEAR(m(i, j), m(j, i), 1e-12);
      }
    }
  }
}

TEST(PairwiseMatrix, KullbackLeiblerIsAsymmetric) {
  const std::vector<std::vector<double>> rows{{0.1, 0.9}, {0.6, 0.4}};
  const auto m = pairwise_matrix({Measure::kullback_leibler}, rows);
  EXPECT_NEAR(m(0, 1), oracle::divergence(Measure::kullback_leibler, rows[0], rows[1]), 1e-12);
  EXPECT_NEAR(m(1, 0), oracle::divergence(Measure::kullback_leibler, rows[1], rows[0]), 1e-12);
  EXPECT_GT(std::abs(m(0, 1) - m(1, 0)), 1e-3);
}
