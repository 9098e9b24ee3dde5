#include "topicdrift/cluster.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "topicdrift/error.hpp"
#include "topicdrift/parallel.hpp"
#include "topicdrift/rng.hpp"

namespace topicdrift {

namespace {

Eigen::MatrixXd plus_plus_seeds(const Eigen::MatrixXd& x, std::size_t k, Rng& rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd centroids(static_cast<Eigen::Index>(k), x.cols());
  centroids.row(0) = x.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd nearest = (x.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (std::size_t c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Eigen::Index pick;
    if (total > 0.0) {
      pick = static_cast<Eigen::Index>(rng.categorical(nearest, total));
    } else {
      pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centroids.row(static_cast<Eigen::Index>(c)) = x.row(pick);
    nearest = nearest.cwiseMin((x.rowwise() - x.row(pick)).rowwise().squaredNorm());
  }
  return centroids;
}

// Assigns every point to its nearest centroid (lowest index on ties); returns inertia.
double assign(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centroids,
              std::vector<std::size_t>& assignments, std::vector<double>& distances) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = (x.row(i) - centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        arg = static_cast<std::size_t>(c);
      }
    }
    assignments[static_cast<std::size_t>(i)] = arg;
    distances[static_cast<std::size_t>(i)] = best;
    inertia += best;
  }
  return inertia;
}

ClusterResult lloyd(const Eigen::MatrixXd& x, const KMeansConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t k = config.clusters;
  const auto n = static_cast<std::size_t>(x.rows());
  ClusterResult result;
  result.seed = seed;
  result.centroids = plus_plus_seeds(x, k, rng);
  result.assignments.assign(n, k);  // sentinel: nothing assigned yet
  std::vector<std::size_t> next(n);
  std::vector<double> distances(n);
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    result.inertia = assign(x, result.centroids, next, distances);
    result.inertia_trace.push_back(result.inertia);
    result.iterations_used = it + 1;
    if (next == result.assignments) break;
    result.assignments = next;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), x.cols());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(static_cast<Eigen::Index>(result.assignments[i])) += x.row(static_cast<Eigen::Index>(i));
      ++counts[result.assignments[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        result.centroids.row(static_cast<Eigen::Index>(c)) =
            sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(counts[c]);
        continue;
      }
      const auto far = static_cast<std::size_t>(
          std::max_element(distances.begin(), distances.end()) - distances.begin());
      result.centroids.row(static_cast<Eigen::Index>(c)) = x.row(static_cast<Eigen::Index>(far));
      distances[far] = 0.0;
    }
  }
  return result;
}

}  // namespace

ClusterResult kmeans(const Eigen::MatrixXd& x, const KMeansConfig& config) {
  if (config.clusters < 1) throw ValidationError("K must be >= 1");
  if (static_cast<std::size_t>(x.rows()) < config.clusters)
    throw ValidationError("k-means needs at least K points");
  if (!x.allFinite()) throw ValidationError("k-means input contains non-finite values");
  const std::size_t restarts = std::max<std::size_t>(1, config.restarts);
  std::vector<ClusterResult> runs(restarts);
  parallel_for(restarts, [&](std::size_t r) { runs[r] = lloyd(x, config, derive_seed(config.seed, r)); });
  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r)
    if (runs[r].inertia < runs[best].inertia) best = r;
  ClusterResult out = std::move(runs[best]);
  out.best_restart = best;
  return out;
}

double purity(std::span<const std::size_t> clusters, std::span<const std::size_t> classes) {
  if (clusters.size() != classes.size()) throw ValidationError("cluster and class lists differ in length");
  if (clusters.empty()) throw ValidationError("purity of an empty assignment");
  std::map<std::size_t, std::map<std::size_t, std::size_t>> table;
  for (std::size_t i = 0; i < clusters.size(); ++i) ++table[clusters[i]][classes[i]];
  std::size_t correct = 0;
  for (const auto& [cluster, by_class] : table) {
    std::size_t best = 0;
    for (const auto& [cls, count] : by_class) best = std::max(best, count);
    correct += best;
  }
  return static_cast<double>(correct) / static_cast<double>(clusters.size());
}

double random_baseline_purity(std::span<const std::size_t> classes, std::size_t trials,
                              std::uint64_t seed) {
  if (classes.size() < 2) throw ValidationError("random baseline needs at least two items");
  if (trials < 1) throw ValidationError("random baseline needs at least one trial");
  Rng rng(seed);
  std::vector<std::size_t> order(classes.size());
  std::vector<std::size_t> partition(classes.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    for (std::size_t i = 0; i < order.size(); ++i) partition[order[i]] = i < order.size() / 2 ? 0 : 1;
    sum += purity(partition, classes);
  }
  return sum / static_cast<double>(trials);
}

}  // namespace topicdrift
