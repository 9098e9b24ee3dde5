#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "topicdrift/error.hpp"
#include "topicdrift/reduce.hpp"
#include "topicdrift/rng.hpp"

using namespace topicdrift;

namespace {

Eigen::MatrixXd random_matrix(std::uint64_t seed, Eigen::Index n, Eigen::Index m) {
  Rng rng(seed);
  Eigen::MatrixXd x(n, m);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  return x;
}

Eigen::MatrixXd blobs(std::uint64_t seed, std::size_t per_blob, std::vector<int>* labels) {
  Rng rng(seed);
  const double centres[3][5] = {{0, 0, 0, 0, 0}, {30, 0, 0, 0, 0}, {0, 30, 0, 30, 0}};
  Eigen::MatrixXd x(static_cast<Eigen::Index>(3 * per_blob), 5);
  for (int b = 0; b < 3; ++b) {
    for (std::size_t i = 0; i < per_blob; ++i) {
      const auto r = static_cast<Eigen::Index>(b * per_blob + i);
      for (int c = 0; c < 5; ++c) x(r, c) = centres[b][c] + rng.normal();
      if (labels) labels->push_back(b);
    }
  }
  return x;
}

}  // namespace

TEST(Pca, RankOneLine) {
  Eigen::MatrixXd x(6, 2);
  for (int i = 0; i < 6; ++i) x.row(i) << i - 1.5, 2.0 * (i - 1.5);
  const auto r = pca(x, 2);
  EXPECT_NEAR(r.explained_variance_ratio(0), 1.0, 1e-9);
  EXPECT_NEAR(r.scores.col(1).cwiseAbs().maxCoeff(), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(r.components(0, 0)), 1.0 / std::sqrt(5.0), 1e-12);
  EXPECT_GT(r.components(1, 0), 0.0);  // largest loading positive
}

TEST(Pca, AxisAlignedInput) {
  Eigen::MatrixXd x(3, 2);
  x << -2, 1, 0, -2, 2, 1;
  const auto r = pca(x, 2);
  EXPECT_NEAR(r.components(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(r.components(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(r.components(1, 1), 1.0, 1e-12);
  EXPECT_NEAR(r.explained_variance_ratio(0), 8.0 / 14.0, 1e-12);
}

TEST(Pca, Invariants) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto x = random_matrix(seed, 30, 6);
    const auto r = pca(x, 3);
    EXPECT_LE(r.explained_variance_ratio.sum(), 1.0 + 1e-9);
    EXPECT_LT(r.scores.colwise().mean().cwiseAbs().maxCoeff(), 1e-12);
    const Eigen::MatrixXd gram = r.components.transpose() * r.components;
    EXPECT_TRUE(gram.isApprox(Eigen::MatrixXd::Identity(3, 3), 1e-12));
    for (Eigen::Index i = 1; i < 3; ++i)
      EXPECT_GE(r.explained_variance_ratio(i - 1), r.explained_variance_ratio(i));
  }
}

TEST(Pca, RowPermutationPermutesScores) {
  const auto x = random_matrix(3, 20, 4);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(20);
  perm.setIdentity();
  Rng rng(4);
  std::vector<int> idx(20);
  std::iota(idx.begin(), idx.end(), 0);
  rng.shuffle(idx);
  for (int i = 0; i < 20; ++i) perm.indices()(i) = idx[static_cast<std::size_t>(i)];
  const auto a = pca(x, 2), b = pca(perm * x, 2);
  EXPECT_TRUE((perm * a.scores).isApprox(b.scores, 1e-10));
}

TEST(Pca, DuplicateRowsMapTogether) {
  Eigen::MatrixXd x(20, 3);
  x.topRows(10) = random_matrix(5, 10, 3);
  x.bottomRows(10) = x.topRows(10);
  const auto r = pca(x, 2);
  EXPECT_TRUE(r.scores.topRows(10).isApprox(r.scores.bottomRows(10), 1e-12));
}

TEST(Pca, RejectsBadDimension) {
  const auto x = random_matrix(1, 5, 3);
  EXPECT_THROW(pca(x, 4), ValidationError);
  EXPECT_THROW(pca(x, 0), ValidationError);
  EXPECT_THROW(pca(Eigen::MatrixXd::Ones(4, 3), 1), ValidationError);
}

TEST(Svd, RankOneReconstruction) {
  Eigen::VectorXd u(5), v(4);
  u << 1, -2, 3, 0.5, 4;
  v << 2, 1, -1, 3;
  const Eigen::MatrixXd x = u * v.transpose();
  const auto r = truncated_svd(x, 1);
  EXPECT_LE((x - r.scores * r.components.transpose()).norm(), 1e-9);
}

TEST(Svd, FullRankIsExactAndOrdered) {
  const auto x = random_matrix(7, 6, 4);
  const auto r = truncated_svd(x, 4);
  EXPECT_LE((x - r.scores * r.components.transpose()).norm(), 1e-10);
  for (Eigen::Index i = 1; i < 4; ++i) EXPECT_GE(r.singular_values(i - 1), r.singular_values(i));
}

TEST(Nmf, RankOneRecovery) {
  Eigen::VectorXd u(6), v(5);
  u << 1, 2, 0.5, 3, 1.5, 2.5;
  v << 0.2, 1, 2, 0.7, 1.1;
  const Eigen::MatrixXd x = u * v.transpose();
  const auto r = nmf(x, 1, 500, 3);
  EXPECT_LE((x - r.w * r.h).norm() / x.norm(), 1e-3);
  EXPECT_GE(r.w.minCoeff(), 0.0);
  EXPECT_GE(r.h.minCoeff(), 0.0);
}

TEST(Nmf, ObjectiveMonotone) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Eigen::MatrixXd x = random_matrix(seed, 15, 8).cwiseAbs();
    const auto r = nmf(x, 3, 100, seed);
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
      EXPECT_LE(r.objective_trace[i], r.objective_trace[i - 1] + 1e-10);
  }
}

TEST(Nmf, ZeroInputAndNegativeInput) {
  const auto r = nmf(Eigen::MatrixXd::Zero(4, 3), 2, 10, 1);
  EXPECT_EQ(r.objective_trace.front(), 0.0);
  EXPECT_THROW(nmf(-Eigen::MatrixXd::Ones(4, 3), 2, 10, 1), ValidationError);
}

TEST(Tsne, EntropyCalibration) {
  const auto x = random_matrix(11, 120, 5);
  const auto aff = calibrate_affinities(squared_distances(x), 25.0);
  for (Eigen::Index i = 0; i < aff.entropy.size(); ++i) {
    EXPECT_NEAR(aff.entropy(i), std::log(25.0), 1e-4);
    EXPECT_NEAR(aff.conditional.row(i).sum(), 1.0, 1e-12);
    EXPECT_EQ(aff.conditional(i, i), 0.0);
  }
}

TEST(Tsne, SeparatesBlobs) {
  std::vector<int> labels;
  const auto x = blobs(2, 20, &labels);
  TsneConfig cfg;
  cfg.perplexity = 10;
  cfg.seed = 5;
  const auto r = tsne(x, cfg);
  EXPECT_LE(r.kl_final, r.kl_initial);
  const auto d = squared_distances(r.embedding);
  std::size_t agree = 0, total = 0;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    std::vector<std::pair<double, Eigen::Index>> order;
    for (Eigen::Index j = 0; j < d.cols(); ++j)
      if (j != i) order.emplace_back(d(i, j), j);
    std::partial_sort(order.begin(), order.begin() + 5, order.end());
    for (int k = 0; k < 5; ++k) {
      agree += labels[static_cast<std::size_t>(order[static_cast<std::size_t>(k)].second)] ==
               labels[static_cast<std::size_t>(i)];
      ++total;
    }
  }
  EXPECT_GE(static_cast<double>(agree) / static_cast<double>(total), 0.95);
}

TEST(Tsne, DuplicatesStayTogether) {
  auto x = blobs(3, 10, nullptr);
  x.row(1) = x.row(0);
  TsneConfig cfg;
  cfg.perplexity = 5;
  const auto r = tsne(x, cfg);
  const double scale = (r.embedding.rowwise() - r.embedding.colwise().mean()).norm() /
                       std::sqrt(static_cast<double>(r.embedding.rows()));
  EXPECT_LE((r.embedding.row(0) - r.embedding.row(1)).norm(), 1e-3 * scale);
}

TEST(Tsne, DeterministicAndClampsPerplexity) {
  const auto x = random_matrix(6, 12, 3);
  TsneConfig cfg;
  cfg.iterations = 300;
  const auto a = tsne(x, cfg), b = tsne(x, cfg);
  EXPECT_EQ(a.embedding, b.embedding);
  EXPECT_TRUE(a.perplexity_clamped);
  EXPECT_NEAR(a.perplexity_used, 11.0 / 3.0, 1e-12);
  EXPECT_THROW(tsne(random_matrix(1, 3, 2), cfg), ValidationError);
}

TEST(Reduce, DispatchAndAlias) {
  const auto x = random_matrix(8, 10, 4);
  ReductionConfig cfg;
  EXPECT_EQ(reduce(x, cfg), pca(x, 2).scores);
  EXPECT_EQ(parse_reduction_method("linear"), ReductionMethod::pca);
  EXPECT_THROW(parse_reduction_method("umap"), ValidationError);
  cfg.target_dim = 4;
  EXPECT_THROW(reduce(x, cfg), ValidationError);
  cfg.method = ReductionMethod::tsne;
  cfg.target_dim = 3;
  EXPECT_THROW(reduce(x, cfg), ValidationError);
}
