#include "topicdrift/classify.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <string>

#include "topicdrift/error.hpp"
#include "topicdrift/io.hpp"
#include "topicdrift/parallel.hpp"
#include "topicdrift/rng.hpp"

namespace topicdrift {

namespace {

double log1p_exp(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_binary(const std::vector<int>& y, Eigen::Index rows) {
  if (static_cast<Eigen::Index>(y.size()) != rows) throw ValidationError("label count differs from row count");
  bool zero = false, one = false;
  for (int v : y) {
    if (v != 0 && v != 1) throw ValidationError("labels must be 0 or 1");
    zero |= v == 0;
    one |= v == 1;
  }
  if (!zero || !one) throw ValidationError("training data must contain both classes");
}

Eigen::MatrixXd subset_rows(const Eigen::MatrixXd& x, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

std::vector<int> subset(const std::vector<int>& y, const std::vector<std::size_t>& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(y[r]);
  return out;
}

// Objective and gradient over the parameter vector [w; b].
struct LogisticObjective {
  const Eigen::MatrixXd& x;
  const Eigen::VectorXd& y;
  double l2;

  double operator()(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
    const Eigen::Index d = x.cols();
    const double n = static_cast<double>(x.rows());
    const auto w = theta.head(d);
    const double b = theta(d);
    const Eigen::VectorXd z = (x * w).array() + b;
    double loss = 0.0;
    Eigen::VectorXd residual(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      loss += log1p_exp(z(i)) - y(i) * z(i);
      residual(i) = sigmoid(z(i)) - y(i);
    }
    grad.resize(d + 1);
    grad.head(d) = (x.transpose() * residual + l2 * w) / n;
    grad(d) = residual.sum() / n;
    return (loss + 0.5 * l2 * w.squaredNorm()) / n;
  }
};

}  // namespace

// --- persistence -------------------------------------------------------------------------

std::string LogisticModel::serialize() const {
  io::BinaryWriter out;
  out.bytes(kMagic);
  out.u32(static_cast<std::uint32_t>(dim()));
  out.f64(bias);
  out.f64(l2);
  out.u32(standardized ? 1 : 0);
  out.u32(static_cast<std::uint32_t>(iterations));
  for (Eigen::Index i = 0; i < weights.size(); ++i) out.f64(weights(i));
  for (Eigen::Index i = 0; i < weights.size(); ++i) out.f64(feature_mean(i));
  for (Eigen::Index i = 0; i < weights.size(); ++i) out.f64(feature_scale(i));
  out.seal();
  return out.buffer();
}

LogisticModel LogisticModel::deserialize(std::string bytes) {
  constexpr std::string_view family = "TMDLOG";
  if (bytes.compare(0, family.size(), family) != 0) throw ParseError("not a logistic model file", 0);
  if (bytes.compare(0, kMagic.size(), kMagic) != 0)
    throw FormatVersionError("logistic model format '" + bytes.substr(0, kMagic.size()) +
                             "' is not supported (expects '" + std::string(kMagic) +
                             "'); retrain with the classify command to migrate it");
  io::BinaryReader in(std::move(bytes), "logistic model");
  in.bytes(kMagic.size());
  LogisticModel m;
  const std::size_t d = in.u32();
  m.bias = in.f64();
  m.l2 = in.f64();
  m.standardized = in.u32() != 0;
  m.iterations = in.u32();
  m.weights.resize(static_cast<Eigen::Index>(d));
  m.feature_mean.resize(static_cast<Eigen::Index>(d));
  m.feature_scale.resize(static_cast<Eigen::Index>(d));
  for (auto* v : {&m.weights, &m.feature_mean, &m.feature_scale})
    for (Eigen::Index i = 0; i < v->size(); ++i) (*v)(i) = in.f64();
  if (!in.at_end()) throw ParseError("logistic model: trailing bytes", 0);
  return m;
}

void LogisticModel::save(const std::filesystem::path& path) const { io::write_atomic(path, serialize()); }

LogisticModel LogisticModel::load(const std::filesystem::path& path) {
  return deserialize(io::read_file(path));
}

// --- logistic regression -------------------------------------------------------------------

LogisticModel logistic_train(const Eigen::MatrixXd& x, const std::vector<int>& y,
                             const LogisticParams& params) {
  check_binary(y, x.rows());
  if (!x.allFinite()) throw ValidationError("features contain non-finite values");
  if (!(params.l2 >= 0.0)) throw ValidationError("l2 regularisation must be >= 0");
  const Eigen::Index d = x.cols();
  const double n = static_cast<double>(x.rows());

  LogisticModel model;
  model.l2 = params.l2;
  model.standardized = params.standardize;
  model.feature_mean = Eigen::VectorXd::Zero(d);
  model.feature_scale = Eigen::VectorXd::Ones(d);
  if (params.standardize) {
    model.feature_mean = x.colwise().mean().transpose();
    for (Eigen::Index c = 0; c < d; ++c) {
      const double sd = std::sqrt((x.col(c).array() - model.feature_mean(c)).square().sum() / n);
      model.feature_scale(c) = sd > 1e-12 ? sd : 1.0;
    }
  }
  const Eigen::MatrixXd xs =
      (x.rowwise() - model.feature_mean.transpose()).array().rowwise() /
      model.feature_scale.transpose().array();
  Eigen::VectorXd targets(x.rows());
  for (Eigen::Index i = 0; i < targets.size(); ++i) targets(i) = y[static_cast<std::size_t>(i)];
  const LogisticObjective objective{xs, targets, params.l2};

  // L-BFGS, memory 10.
  constexpr std::size_t kMemory = 10;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  Eigen::VectorXd grad;
  double f = objective(theta, grad);
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> history;  // (s, y)
  std::size_t it = 0;
  for (; it < params.max_iterations; ++it) {
    if (grad.lpNorm<Eigen::Infinity>() <= params.tolerance) break;
    Eigen::VectorXd q = grad;
    std::vector<double> alphas(history.size());
    for (std::size_t h = history.size(); h-- > 0;) {
      const auto& [s, yv] = history[h];
      alphas[h] = s.dot(q) / yv.dot(s);
      q -= alphas[h] * yv;
    }
    if (!history.empty()) {
      const auto& [s, yv] = history.back();
      q *= s.dot(yv) / yv.squaredNorm();
    }
    for (std::size_t h = 0; h < history.size(); ++h) {
      const auto& [s, yv] = history[h];
      const double beta = yv.dot(q) / yv.dot(s);
      q += (alphas[h] - beta) * s;
    }
    Eigen::VectorXd direction = -q;
    double slope = grad.dot(direction);
    if (slope >= 0.0) {
      history.clear();
      direction = -grad;
      slope = -grad.squaredNorm();
    }
    double step = history.empty() ? std::min(1.0, 1.0 / grad.lpNorm<1>()) : 1.0;
    Eigen::VectorXd next_grad;
    Eigen::VectorXd next;
    double next_f = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      next = theta + step * direction;
      next_f = objective(next, next_grad);
      if (next_f <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    Eigen::VectorXd s = next - theta;
    Eigen::VectorXd yv = next_grad - grad;
    if (s.dot(yv) > 1e-12) {
      history.emplace_back(std::move(s), std::move(yv));
      if (history.size() > kMemory) history.pop_front();
    }
    theta = std::move(next);
    grad = std::move(next_grad);
    f = next_f;
  }
  model.weights = theta.head(d);
  model.bias = theta(d);
  model.iterations = it;
  return model;
}

LogisticPrediction logistic_predict(const LogisticModel& model, const Eigen::MatrixXd& x) {
  if (static_cast<std::size_t>(x.cols()) != model.dim())
    throw ValidationError("feature dimension " + std::to_string(x.cols()) + " does not match model dimension " +
                          std::to_string(model.dim()));
  const Eigen::MatrixXd xs = (x.rowwise() - model.feature_mean.transpose()).array().rowwise() /
                             model.feature_scale.transpose().array();
  const Eigen::VectorXd z = (xs * model.weights).array() + model.bias;
  LogisticPrediction out;
  out.probabilities.resize(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    out.probabilities(i) = sigmoid(z(i));
    out.labels.push_back(out.probabilities(i) >= 0.5 ? 1 : 0);
  }
  return out;
}

// --- kNN ------------------------------------------------------------------------------------

std::vector<int> knn_predict(const Eigen::MatrixXd& train_x, const std::vector<int>& train_y,
                             const Eigen::MatrixXd& query_x, std::size_t k) {
  const auto n = static_cast<std::size_t>(train_x.rows());
  if (train_y.size() != n) throw ValidationError("label count differs from training rows");
  if (k < 1 || k > n) throw ValidationError("k must be in [1, number of training rows]");
  if (query_x.cols() != train_x.cols()) throw ValidationError("query dimension differs from training data");
  std::vector<int> out(static_cast<std::size_t>(query_x.rows()));
  parallel_for(out.size(), [&](std::size_t q) {
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i)
      dist[i] = {(train_x.row(static_cast<Eigen::Index>(i)) - query_x.row(static_cast<Eigen::Index>(q)))
                     .squaredNorm(),
                 i};
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    std::map<int, std::size_t> votes;
    for (std::size_t j = 0; j < k; ++j) ++votes[train_y[dist[j].second]];
    std::size_t best_count = 0;
    for (const auto& [label, count] : votes) best_count = std::max(best_count, count);
    int winner = train_y[dist[0].second];
    if (votes[winner] != best_count) {
      // Nearest neighbour's label is not among the leaders: take the leader
      // whose closest member is nearest.
      for (std::size_t j = 0; j < k; ++j) {
        if (votes[train_y[dist[j].second]] == best_count) {
          winner = train_y[dist[j].second];
          break;
        }
      }
    }
    out[q] = winner;
  });
  return out;
}

// --- evaluation ------------------------------------------------------------------------------

EvalMetrics evaluate_predictions(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.size() != predicted.size()) throw ValidationError("prediction count differs from truth");
  if (truth.empty()) throw ValidationError("no predictions to evaluate");
  EvalMetrics m;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == predicted[i];
  m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  for (int cls : {0, 1}) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      tp += predicted[i] == cls && truth[i] == cls;
      fp += predicted[i] == cls && truth[i] != cls;
      fn += predicted[i] != cls && truth[i] == cls;
    }
    const double p = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double r = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.precision += p / 2.0;
    m.recall += r / 2.0;
    m.f1 += (p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0) / 2.0;
  }
  return m;
}

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& y, std::size_t folds,
                                                       std::uint64_t seed) {
  if (folds < 2) throw ValidationError("need at least two folds");
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> out(folds);
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == cls) members.push_back(i);
    if (members.size() < folds)
      throw ValidationError("class " + std::to_string(cls) + " has " + std::to_string(members.size()) +
                            " items, fewer than the " + std::to_string(folds) + " folds");
    rng.shuffle(members);
    for (std::size_t j = 0; j < members.size(); ++j) out[j % folds].push_back(members[j]);
  }
  for (auto& fold : out) std::sort(fold.begin(), fold.end());
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    const std::vector<int>& y, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ValidationError("test fraction must be in (0, 1)");
  Rng rng(seed);
  std::vector<std::size_t> train, test;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == cls) members.push_back(i);
    rng.shuffle(members);
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(members.size())));
    if (n_test < 1 || n_test >= members.size())
      throw ValidationError("class " + std::to_string(cls) + " is too small for a stratified split");
    test.insert(test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    train.insert(train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

std::string_view to_string(ClassifierKind k) noexcept {
  return k == ClassifierKind::logistic ? "logistic" : "knn";
}

ClassifierKind parse_classifier(std::string_view name) {
  if (name == "logistic") return ClassifierKind::logistic;
  if (name == "knn") return ClassifierKind::knn;
  throw ValidationError("unknown classifier '" + std::string(name) + "'");
}

namespace {

struct Setting {
  double l2 = 0.0;
  std::size_t k = 0;
};

std::vector<int> fit_predict(const ModelSpec& spec, const Setting& setting, const Eigen::MatrixXd& train_x,
                             const std::vector<int>& train_y, const Eigen::MatrixXd& query_x) {
  if (spec.kind == ClassifierKind::knn) return knn_predict(train_x, train_y, query_x, setting.k);
  LogisticParams params = spec.logistic;
  params.l2 = setting.l2;
  return logistic_predict(logistic_train(train_x, train_y, params), query_x).labels;
}

std::vector<EvalMetrics> cross_validate(const ModelSpec& spec, const Setting& setting, const Eigen::MatrixXd& x,
                                        const std::vector<int>& y, std::uint64_t seed) {
  const auto folds = stratified_folds(y, kCrossValidationFolds, seed);
  std::vector<EvalMetrics> out(folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<std::size_t> train;
    for (std::size_t g = 0; g < folds.size(); ++g)
      if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
    std::sort(train.begin(), train.end());
    const auto train_y = subset(y, train);
    const auto predicted = fit_predict(spec, setting, subset_rows(x, train), train_y, subset_rows(x, folds[f]));
    out[f] = evaluate_predictions(subset(y, folds[f]), predicted);
  }
  return out;
}

EvalMetrics mean_metrics(const std::vector<EvalMetrics>& folds) {
  EvalMetrics m;
  for (const auto& f : folds) {
    m.accuracy += f.accuracy;
    m.f1 += f.f1;
    m.precision += f.precision;
    m.recall += f.recall;
  }
  const double n = static_cast<double>(folds.size());
  m.accuracy /= n;
  m.f1 /= n;
  m.precision /= n;
  m.recall /= n;
  return m;
}

}  // namespace

ProtocolResult evaluate_protocol(const Eigen::MatrixXd& x, const std::vector<int>& y, const ModelSpec& spec,
                                 std::uint64_t seed) {
  if (x.rows() < 10) throw ValidationError("the evaluation protocol needs at least 10 rows");
  check_binary(y, x.rows());
  std::vector<Setting> candidates;
  if (spec.kind == ClassifierKind::logistic) {
    for (double l2 : spec.l2_grid) candidates.push_back({l2, 0});
  } else {
    for (std::size_t k : spec.k_grid) candidates.push_back({0.0, k});
  }
  if (candidates.empty()) throw ValidationError("empty hyperparameter grid");

  const auto [train, test] = stratified_split(y, kTestFraction, derive_seed(seed, 1));
  const Eigen::MatrixXd train_x = subset_rows(x, train);
  const auto train_y = subset(y, train);

  Setting best = candidates.front();
  if (candidates.size() > 1) {
    double best_accuracy = -1.0;
    for (const auto& c : candidates) {
      const double acc = mean_metrics(cross_validate(spec, c, train_x, train_y, derive_seed(seed, 2))).accuracy;
      if (acc > best_accuracy) {
        best_accuracy = acc;
        best = c;
      }
    }
  }

  ProtocolResult result;
  result.selected_l2 = best.l2;
  result.selected_k = best.k;
  result.n_train = train.size();
  result.n_test = test.size();
  result.test = evaluate_predictions(subset(y, test),
                                     fit_predict(spec, best, train_x, train_y, subset_rows(x, test)));
  result.cv_folds = cross_validate(spec, best, x, y, derive_seed(seed, 3));
  result.cv = mean_metrics(result.cv_folds);
  return result;
}

}  // namespace topicdrift
