#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace topicdrift {

struct PcaResult {
  /// n x d projections of the centred data.
  Eigen::MatrixXd scores;
  /// m x d orthonormal loadings; each column's largest-magnitude entry is positive.
  Eigen::MatrixXd components;
  Eigen::VectorXd explained_variance_ratio;
  Eigen::RowVectorXd mean;
};

PcaResult pca(const Eigen::MatrixXd& x, std::size_t dims);

struct SvdResult {
  /// U_d Sigma_d (no centring).
  Eigen::MatrixXd scores;
  Eigen::VectorXd singular_values;
  /// V_d, m x d.
  Eigen::MatrixXd components;
};

SvdResult truncated_svd(const Eigen::MatrixXd& x, std::size_t dims);

struct NmfResult {
  Eigen::MatrixXd w;  // n x d
  Eigen::MatrixXd h;  // d x m
  /// Squared Frobenius error after initialisation and after every update pass.
  std::vector<double> objective_trace;
};

/// Lee-Seung multiplicative updates for min |X - WH|_F^2 with W, H >= 0.
NmfResult nmf(const Eigen::MatrixXd& x, std::size_t dims, std::size_t iterations, std::uint64_t seed);

struct TsneConfig {
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;
  std::uint64_t seed = 0;
};

struct TsneResult {
  Eigen::MatrixXd embedding;  // n x 2
  double kl_initial = 0.0;
  double kl_final = 0.0;
  double perplexity_used = 0.0;
  /// Set when the requested perplexity exceeded (n - 1) / 3 and was lowered.
  bool perplexity_clamped = false;
};

struct Affinities {
  /// Row i holds p(j | i); the diagonal is zero.
  Eigen::MatrixXd conditional;
  /// Shannon entropy (nats) of each row.
  Eigen::VectorXd entropy;
  /// Precision 1 / (2 sigma_i^2) found for each point.
  Eigen::VectorXd precision;
};

/// Binary-searches each point's Gaussian bandwidth so the conditional
/// distribution's entropy equals log(perplexity).
Affinities calibrate_affinities(const Eigen::MatrixXd& squared_distances, double perplexity,
                                double tolerance = 1e-10);

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x);

/// Exact O(n^2) t-SNE to two dimensions, initialised from scaled PCA.
TsneResult tsne(const Eigen::MatrixXd& x, const TsneConfig& config);

enum class ReductionMethod { pca, svd, nmf, tsne };

std::string_view to_string(ReductionMethod m) noexcept;
ReductionMethod parse_reduction_method(std::string_view name);

struct ReductionConfig {
  ReductionMethod method = ReductionMethod::pca;
  std::size_t target_dim = 2;
  std::size_t nmf_iterations = 500;
  TsneConfig tsne;
};

/// Dispatches to the configured method; output rows follow input rows.
Eigen::MatrixXd reduce(const Eigen::MatrixXd& x, const ReductionConfig& config,
                       std::string* warning = nullptr);

}  // namespace topicdrift
