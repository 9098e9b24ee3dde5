#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace topicdrift {

struct LogisticParams {
  double l2 = 1.0;
  std::size_t max_iterations = 1000;
  /// Stop when the gradient's infinity norm falls to this value.
  double tolerance = 1e-6;
  bool standardize = true;
};

/// Binary logistic regression over (optionally) standardised features.
struct LogisticModel {
  static constexpr std::string_view kMagic = "TMDLOG1";

  Eigen::VectorXd weights;
  double bias = 0.0;
  double l2 = 0.0;
  bool standardized = true;
  Eigen::VectorXd feature_mean;
  Eigen::VectorXd feature_scale;
  std::size_t iterations = 0;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(weights.size()); }
  std::string serialize() const;
  static LogisticModel deserialize(std::string bytes);
  void save(const std::filesystem::path& path) const;
  static LogisticModel load(const std::filesystem::path& path);
};

/// Minimises mean negative log-likelihood + (l2 / 2n)|w|^2 (bias unpenalised) by
/// L-BFGS with backtracking line search. Labels are 0/1 and both must occur.
LogisticModel logistic_train(const Eigen::MatrixXd& x, const std::vector<int>& y,
                             const LogisticParams& params = {});

struct LogisticPrediction {
  Eigen::VectorXd probabilities;
  std::vector<int> labels;  // probability >= 0.5
};

LogisticPrediction logistic_predict(const LogisticModel& model, const Eigen::MatrixXd& x);

/// Brute-force Euclidean kNN. Distance ties go to the lower training index; vote
/// ties go to the nearest neighbour's label.
std::vector<int> knn_predict(const Eigen::MatrixXd& train_x, const std::vector<int>& train_y,
                             const Eigen::MatrixXd& query_x, std::size_t k);

/// Macro averages over the two classes.
struct EvalMetrics {
  double accuracy = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

EvalMetrics evaluate_predictions(const std::vector<int>& truth, const std::vector<int>& predicted);

/// Stratified folds: fold f holds indices whose within-class shuffled position is
/// congruent to f.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& y, std::size_t folds,
                                                       std::uint64_t seed);

/// Stratified (train, test) index split with `test_fraction` of each class in test.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    const std::vector<int>& y, double test_fraction, std::uint64_t seed);

enum class ClassifierKind { logistic, knn };

std::string_view to_string(ClassifierKind k) noexcept;
ClassifierKind parse_classifier(std::string_view name);

struct ModelSpec {
  ClassifierKind kind = ClassifierKind::logistic;
  LogisticParams logistic;
  /// Candidates for model selection on the training portion.
  std::vector<double> l2_grid{1.0};
  std::vector<std::size_t> k_grid{20};
};

struct ProtocolResult {
  /// Mean over stratified 5-fold CV on the full data with the selected setting.
  EvalMetrics cv;
  std::vector<EvalMetrics> cv_folds;
  /// Fit on the 80% split, scored on the untouched 20%.
  EvalMetrics test;
  double selected_l2 = 0.0;
  std::size_t selected_k = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

/// Stratified 80/20 split; hyperparameters selected by 5-fold CV on the 80%;
/// reports both 5-fold CV metrics on all data and held-out test metrics.
ProtocolResult evaluate_protocol(const Eigen::MatrixXd& x, const std::vector<int>& y,
                                 const ModelSpec& spec, std::uint64_t seed);

inline constexpr std::size_t kCrossValidationFolds = 5;
inline constexpr double kTestFraction = 0.2;

}  // namespace topicdrift
