#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "topicdrift/embedcmp.hpp"
#include "topicdrift/error.hpp"
#include "topicdrift/rng.hpp"

using namespace topicdrift;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index n, Eigen::Index m) {
  Eigen::MatrixXd x(n, m);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  return x;
}

// Brute force: explicit dot products and norms per pair.
double cosim_oracle(const Eigen::MatrixXd& m, Eigen::Index i) {
  long double sum = 0.0L;
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    if (j == i) continue;
    long double dot = 0.0L, ni = 0.0L, nj = 0.0L;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      dot += static_cast<long double>(m(i, c)) * m(j, c);
      ni += static_cast<long double>(m(i, c)) * m(i, c);
      nj += static_cast<long double>(m(j, c)) * m(j, c);
    }
    sum += dot / std::sqrt(ni * nj);
  }
  return static_cast<double>(sum / static_cast<long double>(m.rows() - 1));
}

Eigen::MatrixXd tight_cone(Rng& rng, Eigen::Index n, Eigen::Index dim) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (Eigen::Index c = 1; c < dim; ++c) x(i, c) = 0.05 * rng.normal();
  }
  return x;
}

}  // namespace

TEST(MeanPairwiseCosim, HandExamples) {
  const Eigen::MatrixXd same = Eigen::MatrixXd::Constant(3, 4, 2.0);
  EXPECT_TRUE(mean_pairwise_cosim(same).isApprox(Eigen::VectorXd::Ones(3), 1e-15));
  const Eigen::MatrixXd ortho = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_TRUE(mean_pairwise_cosim(ortho).isZero(1e-15));
  Eigen::MatrixXd three(3, 2);
  three << 1, 0, 0, 1, std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2;
  const auto v = mean_pairwise_cosim(three);
  EXPECT_NEAR(v(0), 0.35355339059327373, 1e-12);
  EXPECT_NEAR(v(1), 0.35355339059327373, 1e-12);
  EXPECT_NEAR(v(2), 0.70710678118654757, 1e-12);
}

TEST(MeanPairwiseCosim, MatchesBruteForce) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = random_matrix(rng, 2 + static_cast<Eigen::Index>(rng.below(15)),
                                 1 + static_cast<Eigen::Index>(rng.below(20)));
    const auto v = mean_pairwise_cosim(m);
    for (Eigen::Index i = 0; i < m.rows(); ++i) EXPECT_NEAR(v(i), cosim_oracle(m, i), 1e-12);
  }
}

TEST(MeanPairwiseCosim, ScaleInvariant) {
  Rng rng(2);
  const auto m = random_matrix(rng, 8, 5);
  Eigen::MatrixXd scaled = m;
  for (Eigen::Index i = 0; i < scaled.rows(); ++i) scaled.row(i) *= 0.1 + 10.0 * rng.uniform();
  EXPECT_TRUE(mean_pairwise_cosim(m).isApprox(mean_pairwise_cosim(scaled), 1e-12));
}

TEST(MeanPairwiseCosim, RejectsBadInput) {
  EXPECT_THROW(mean_pairwise_cosim(Eigen::MatrixXd::Ones(1, 3)), ValidationError);
  Eigen::MatrixXd zero_row = Eigen::MatrixXd::Ones(3, 2);
  zero_row.row(1).setZero();
  EXPECT_THROW(mean_pairwise_cosim(zero_row), ValidationError);
}

TEST(GroupDelta, IdenticalGroups) {
  Rng rng(3);
  const auto m = random_matrix(rng, 6, 4);
  const auto r = group_delta(m, m);
  EXPECT_DOUBLE_EQ(r.delta_mean, 0.0);
  EXPECT_DOUBLE_EQ(r.delta_median, 0.0);
  EXPECT_DOUBLE_EQ(r.test.p_value, 1.0);
}

TEST(GroupDelta, Antisymmetric) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_matrix(rng, 5, 3), b = random_matrix(rng, 7, 3);
    const auto ab = group_delta(a, b), ba = group_delta(b, a);
    EXPECT_EQ(ab.delta_mean, -ba.delta_mean);
    EXPECT_EQ(ab.delta_median, -ba.delta_median);
  }
}

TEST(GroupDelta, ConeVersusOrthogonal) {
  Rng rng(5);
  const auto cone = tight_cone(rng, 10, 12);
  Eigen::MatrixXd spread = Eigen::MatrixXd::Identity(10, 12);
  for (Eigen::Index i = 0; i < spread.size(); ++i) spread.data()[i] += 0.01 * rng.normal();
  const auto r = group_delta(cone, spread, Alternative::greater);
  EXPECT_GT(r.delta_mean, 0.5);
  EXPECT_LT(r.test.p_value, 0.01);
}

TEST(Affinity, HandExamples) {
  Eigen::VectorXd post(3);
  post << 1, 2, 3;
  Eigen::MatrixXd same(2, 3);
  same << 1, 2, 3, 1, 2, 3;
  EXPECT_NEAR(post_comment_affinity(post, same, AffinityMetric::cosine_similarity), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(post_comment_affinity(post, same, AffinityMetric::euclidean), 0.0);
  const Eigen::VectorXd e1 = Eigen::VectorXd::Unit(2, 0);
  const Eigen::MatrixXd e2 = Eigen::RowVectorXd::Unit(2, 1);
  EXPECT_DOUBLE_EQ(post_comment_affinity(e1, e2, AffinityMetric::cosine_similarity), 0.0);
  EXPECT_DOUBLE_EQ(post_comment_affinity(e1, e2, AffinityMetric::euclidean), std::sqrt(2.0));
  EXPECT_THROW(post_comment_affinity(Eigen::VectorXd::Zero(2), e2, AffinityMetric::cosine_similarity),
               ValidationError);
}

TEST(ScoreCompare, SmallGroupsHandValues) {
  const std::vector<double> a{4, 4, 4, 3}, b{0, 1, 0, 1};
  const auto r = score_group_compare(a, b, Alternative::greater);
  EXPECT_DOUBLE_EQ(r.delta_mean, 3.25);
  EXPECT_DOUBLE_EQ(r.delta_median, 3.5);
  EXPECT_LT(r.mann_whitney.p_value, 0.05);
  EXPECT_LT(r.t_test.p_value, 0.05);
}

TEST(ScoreCompare, IdenticalAndConstant) {
  const std::vector<double> a{0.2, 0.5, 0.9};
  const auto r = score_group_compare(a, a);
  EXPECT_DOUBLE_EQ(r.delta_mean, 0.0);
  EXPECT_DOUBLE_EQ(r.mann_whitney.p_value, 1.0);
  EXPECT_DOUBLE_EQ(r.t_test.p_value, 1.0);
  EXPECT_THROW(score_group_compare(std::vector<double>{1, 1}, std::vector<double>{2, 2}), ValidationError);
  EXPECT_THROW(score_group_compare(std::vector<double>{1}, std::vector<double>{2, 3}), ValidationError);
}

TEST(EmbeddingFiles, ParseAndSplit) {
  const auto set = parse_embeddings(
      "id\tgroup\t3\n"
      "a\trumour\t1 0 0\n"
      "b\tnonrumour\t0 1 0\n"
      "c\trumour\t0 0 2\n");
  EXPECT_EQ(set.dim, 3u);
  EXPECT_EQ(set.ids, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(set.rows_of(Group::rumour).rows(), 2);
  EXPECT_EQ(set.rows_of(Group::nonrumour)(0, 1), 1.0);
  EXPECT_THROW(parse_embeddings("id\tgroup\t2\na\trumour\t1 0\nb\trumour\t1 0 0\n"), ParseError);
  EXPECT_THROW(parse_embeddings("id\tgroup\t2\na\tother\t1 0\n"), ValidationError);
}

TEST(EmbeddingFiles, ParseScores) {
  const auto s = parse_scores("id\tgroup\tscore\nx\trumour\t0.5\ny\tnonrumour\t-1\nz\trumour\t2\n");
  EXPECT_EQ(s.rumour, (std::vector<double>{0.5, 2.0}));
  EXPECT_EQ(s.nonrumour, (std::vector<double>{-1.0}));
  EXPECT_THROW(parse_scores("x\trumour\tabc\n"), ParseError);
}
