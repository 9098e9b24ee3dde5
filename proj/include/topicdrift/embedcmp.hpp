#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "topicdrift/stats.hpp"

namespace topicdrift {

enum class Group { rumour, nonrumour };

std::string_view to_string(Group g) noexcept;
Group parse_group(std::string_view name);

struct EmbeddingSet {
  std::size_t dim = 0;
  std::vector<std::string> ids;
  std::vector<Group> groups;
  /// One row per id, in file order.
  Eigen::MatrixXd vectors;

  Eigen::MatrixXd rows_of(Group g) const;
};

/// Header `id<TAB>group<TAB>dim`, then `id<TAB>group<TAB>v0 v1 ...` per line.
EmbeddingSet parse_embeddings(std::string_view contents);
EmbeddingSet load_embeddings(const std::filesystem::path& path);

struct GroupScores {
  std::vector<double> rumour;
  std::vector<double> nonrumour;
};

/// TSV `id<TAB>group<TAB>score` (an optional header row starting with `id` is skipped).
GroupScores parse_scores(std::string_view contents);

/// Entry i is the mean cosine similarity of row i to every other row.
Eigen::VectorXd mean_pairwise_cosim(const Eigen::MatrixXd& m);

struct GroupComparison {
  double mean_rumour = 0.0;
  double mean_nonrumour = 0.0;
  double delta_mean = 0.0;
  double median_rumour = 0.0;
  double median_nonrumour = 0.0;
  double delta_median = 0.0;
  TestResult test;
};

GroupComparison group_delta(const Eigen::MatrixXd& rumour, const Eigen::MatrixXd& nonrumour,
                            Alternative alternative = Alternative::two_sided);

enum class AffinityMetric { cosine_similarity, euclidean };

AffinityMetric parse_affinity_metric(std::string_view name);
std::string_view to_string(AffinityMetric m) noexcept;

double post_comment_affinity(const Eigen::VectorXd& post, const Eigen::MatrixXd& comments,
                             AffinityMetric metric);

struct ScoreComparison {
  Summary a;
  Summary b;
  double delta_mean = 0.0;
  double delta_median = 0.0;
  TestResult mann_whitney;
  TestResult t_test;
};

ScoreComparison score_group_compare(std::span<const double> a, std::span<const double> b,
                                    Alternative alternative = Alternative::two_sided);

}  // namespace topicdrift
