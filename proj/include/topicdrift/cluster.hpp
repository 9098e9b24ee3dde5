#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace topicdrift {

struct KMeansConfig {
  std::size_t clusters = 2;
  std::size_t max_iterations = 500;
  std::size_t restarts = 10;
  std::uint64_t seed = 0;
};

struct ClusterResult {
  std::vector<std::size_t> assignments;
  Eigen::MatrixXd centroids;  // K x d
  double inertia = 0.0;
  std::size_t iterations_used = 0;
  std::uint64_t seed = 0;
  /// Restart whose result was kept (lowest inertia, earliest on ties).
  std::size_t best_restart = 0;
  /// Inertia after every assignment step of the kept run.
  std::vector<double> inertia_trace;
};

/// Lloyd's algorithm from k-means++ seeding, best of `restarts` runs. A cluster
/// that empties is reseeded at the point farthest from its centroid.
ClusterResult kmeans(const Eigen::MatrixXd& x, const KMeansConfig& config = {});

/// (1/D) sum_k max_j |cluster_k intersect class_j|.
double purity(std::span<const std::size_t> clusters, std::span<const std::size_t> classes);

/// Mean purity of `trials` seeded random partitions into two halves.
double random_baseline_purity(std::span<const std::size_t> classes, std::size_t trials,
                              std::uint64_t seed);

}  // namespace topicdrift
