#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "topicdrift/cluster.hpp"
#include "topicdrift/error.hpp"
#include "topicdrift/rng.hpp"

using namespace topicdrift;

namespace {

Eigen::MatrixXd two_groups(std::uint64_t seed, Eigen::Index per_group) {
  Rng rng(seed);
  Eigen::MatrixXd x(2 * per_group, 2);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double c = i < per_group ? 0.0 : 10.0;
    x(i, 0) = c + 0.2 * (rng.uniform() - 0.5);
    x(i, 1) = c + 0.2 * (rng.uniform() - 0.5);
  }
  return x;
}

}  // namespace

TEST(Purity, HandCounts) {
  using V = std::vector<std::size_t>;
  EXPECT_DOUBLE_EQ(purity(V{0, 0, 1, 1}, V{0, 0, 1, 1}), 1.0);
  EXPECT_NEAR(purity(V{0, 0, 0, 1, 1, 1}, V{0, 0, 1, 1, 1, 0}), 4.0 / 6.0, 1e-15);
  EXPECT_DOUBLE_EQ(purity(V{0, 0, 0, 0}, V{0, 0, 0, 1}), 0.75);
  EXPECT_THROW(purity(V{0, 1}, V{0}), ValidationError);
}

TEST(Purity, MatchesTallyOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(60), k = 1 + rng.below(5), c = 1 + rng.below(3);
    std::vector<std::size_t> clusters(n), classes(n);
    for (auto& v : clusters) v = rng.below(k);
    for (auto& v : classes) v = rng.below(c);
    const double p = purity(clusters, classes);
    EXPECT_EQ(p, oracle::purity(clusters, classes));
    // Lower bound: the single-cluster purity equals the majority share.
    EXPECT_GE(p, oracle::purity(std::vector<std::size_t>(n, 0), classes));
  }
}

TEST(KMeans, SeparatesTwoGroups) {
  const auto x = two_groups(2, 25);
  const auto r = kmeans(x, {2, 100, 5, 9});
  for (Eigen::Index i = 1; i < 25; ++i) EXPECT_EQ(r.assignments[static_cast<std::size_t>(i)], r.assignments[0]);
  for (Eigen::Index i = 26; i < 50; ++i) EXPECT_EQ(r.assignments[static_cast<std::size_t>(i)], r.assignments[25]);
  EXPECT_NE(r.assignments[0], r.assignments[25]);
  std::vector<std::size_t> classes(50, 0);
  std::fill(classes.begin() + 25, classes.end(), 1);
  EXPECT_DOUBLE_EQ(purity(r.assignments, classes), 1.0);
}

TEST(KMeans, EachPointItsOwnCluster) {
  Eigen::MatrixXd x(3, 2);
  x << 0, 0, 5, 1, -3, 2;
  const auto r = kmeans(x, {3, 50, 3, 1});
  EXPECT_DOUBLE_EQ(r.inertia, 0.0);
  std::set<std::size_t> distinct(r.assignments.begin(), r.assignments.end());
  EXPECT_EQ(distinct.size(), 3u);
  EXPECT_THROW(kmeans(x, {4, 50, 3, 1}), ValidationError);
}

TEST(KMeans, InertiaTraceNonIncreasing) {
  Rng rng(5);
  Eigen::MatrixXd x(80, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  const auto r = kmeans(x, {4, 100, 3, 2});
  for (std::size_t i = 1; i < r.inertia_trace.size(); ++i)
    EXPECT_LE(r.inertia_trace[i], r.inertia_trace[i - 1] + 1e-12);
  EXPECT_NEAR(r.inertia_trace.back(), r.inertia, 1e-9);
}

TEST(KMeans, ReproducibleAndRestartsHelp) {
  Rng rng(6);
  Eigen::MatrixXd x(60, 2);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  const auto a = kmeans(x, {5, 100, 8, 3}), b = kmeans(x, {5, 100, 8, 3});
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.inertia, b.inertia);
  const auto single = kmeans(x, {5, 100, 1, 3});
  EXPECT_LE(a.inertia, single.inertia);
}

TEST(RandomBaseline, BalancedLabelsNearHalf) {
  std::vector<std::size_t> classes(400);
  for (std::size_t i = 0; i < classes.size(); ++i) classes[i] = i % 2;
  EXPECT_NEAR(random_baseline_purity(classes, 1000, 4), 0.5, 0.02);
}

TEST(RandomBaseline, SingleLabelIsOne) {
  EXPECT_DOUBLE_EQ(random_baseline_purity(std::vector<std::size_t>(30, 1), 50, 1), 1.0);
}

TEST(RandomBaseline, ImbalancedCorpusTracksMajorityShare) {
  // 331 vs 1214 labels: a random split scores about 0.7864.
  std::vector<std::size_t> classes(331, 0);
  classes.resize(331 + 1214, 1);
  EXPECT_NEAR(random_baseline_purity(classes, 200, 8), 0.7864, 0.005);
}
