#include "topicdrift/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "topicdrift/error.hpp"
#include "topicdrift/rng.hpp"

namespace topicdrift {

namespace {

void check_dims(const Eigen::MatrixXd& x, std::size_t dims) {
  if (x.rows() < 2) throw ValidationError("dimensionality reduction needs at least two rows");
  if (!x.allFinite()) throw ValidationError("input contains non-finite values");
  if (dims < 1 || dims > static_cast<std::size_t>(x.cols()) ||
      dims > static_cast<std::size_t>(x.rows()))
    throw ValidationError("target dimension " + std::to_string(dims) + " is out of range for a " +
                          std::to_string(x.rows()) + "x" + std::to_string(x.cols()) + " input");
}

// Flips each column so that its largest-magnitude entry is positive; applies the
// same flip to `paired`.
void fix_signs(Eigen::MatrixXd& columns, Eigen::MatrixXd& paired) {
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    Eigen::Index arg = 0;
    columns.col(c).cwiseAbs().maxCoeff(&arg);
    if (columns(arg, c) < 0.0) {
      columns.col(c) *= -1.0;
      paired.col(c) *= -1.0;
    }
  }
}

}  // namespace

PcaResult pca(const Eigen::MatrixXd& x, std::size_t dims) {
  check_dims(x, dims);
  PcaResult out;
  out.mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - out.mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("PCA eigendecomposition failed");
  // Eigenvalues come back ascending.
  const Eigen::VectorXd values = eig.eigenvalues().reverse().cwiseMax(0.0);
  const double total = values.sum();
  if (!(total > 0.0)) throw ValidationError("PCA input has zero variance");
  const auto d = static_cast<Eigen::Index>(dims);
  out.components = eig.eigenvectors().rowwise().reverse().leftCols(d);
  out.explained_variance_ratio = values.head(d) / total;
  Eigen::MatrixXd unused = Eigen::MatrixXd::Zero(1, d);
  fix_signs(out.components, unused);
  out.scores = centered * out.components;
  return out;
}

SvdResult truncated_svd(const Eigen::MatrixXd& x, std::size_t dims) {
  check_dims(x, dims);
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto d = static_cast<Eigen::Index>(dims);
  SvdResult out;
  out.singular_values = svd.singularValues().head(d);
  out.components = svd.matrixV().leftCols(d);
  Eigen::MatrixXd u = svd.matrixU().leftCols(d);
  fix_signs(out.components, u);
  out.scores = u * out.singular_values.asDiagonal();
  return out;
}

NmfResult nmf(const Eigen::MatrixXd& x, std::size_t dims, std::size_t iterations, std::uint64_t seed) {
  check_dims(x, dims);
  if ((x.array() < 0.0).any()) throw ValidationError("NMF input must be non-negative");
  constexpr double kDenominatorFloor = 1e-16;
  const auto n = x.rows(), m = x.cols();
  const auto d = static_cast<Eigen::Index>(dims);
  const double scale = std::sqrt(x.mean() / static_cast<double>(dims));
  Rng rng(seed);
  NmfResult out;
  out.w.resize(n, d);
  out.h.resize(d, m);
  for (Eigen::Index i = 0; i < out.w.size(); ++i) out.w.data()[i] = scale * rng.uniform();
  for (Eigen::Index i = 0; i < out.h.size(); ++i) out.h.data()[i] = scale * rng.uniform();

  auto objective = [&] { return (x - out.w * out.h).squaredNorm(); };
  out.objective_trace.push_back(objective());
  for (std::size_t it = 0; it < iterations; ++it) {
    const Eigen::MatrixXd h_num = out.w.transpose() * x;
    const Eigen::MatrixXd h_den = (out.w.transpose() * out.w) * out.h;
    out.h.array() *= h_num.array() / h_den.array().max(kDenominatorFloor);
    const Eigen::MatrixXd w_num = x * out.h.transpose();
    const Eigen::MatrixXd w_den = out.w * (out.h * out.h.transpose());
    out.w.array() *= w_num.array() / w_den.array().max(kDenominatorFloor);
    out.objective_trace.push_back(objective());
  }
  return out;
}

// --- t-SNE ------------------------------------------------------------------------

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (x.row(i) - x.row(j)).squaredNorm();
  }
  return d;
}

Affinities calibrate_affinities(const Eigen::MatrixXd& squared, double perplexity, double tolerance) {
  const Eigen::Index n = squared.rows();
  if (n < 2 || squared.cols() != n) throw ValidationError("distance matrix must be square, n >= 2");
  if (!(perplexity >= 1.0) || perplexity > static_cast<double>(n - 1))
    throw ValidationError("perplexity must lie in [1, n - 1]");
  const double target = std::log(perplexity);
  Affinities out;
  out.conditional = Eigen::MatrixXd::Zero(n, n);
  out.entropy.resize(n);
  out.precision.resize(n);
  std::vector<double> row(static_cast<std::size_t>(n));

  for (Eigen::Index i = 0; i < n; ++i) {
    double min_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) min_d = std::min(min_d, squared(i, j));
    // Entropy and normalised row at precision beta; distances shifted by the
    // minimum so the largest weight is exp(0).
    auto evaluate = [&](double beta) {
      double sum = 0.0, weighted = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) {
          row[j] = 0.0;
          continue;
        }
        const double shifted = squared(i, j) - min_d;
        row[j] = std::exp(-beta * shifted);
        sum += row[j];
        weighted += shifted * row[j];
      }
      for (auto& p : row) p /= sum;
      return std::log(sum) + beta * weighted / sum;
    };
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double entropy = evaluate(beta);
    for (int step = 0; step < 200 && std::abs(entropy - target) > tolerance; ++step) {
      if (entropy > target) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
      entropy = evaluate(beta);
    }
    for (Eigen::Index j = 0; j < n; ++j) out.conditional(i, j) = row[j];
    out.entropy(i) = entropy;
    out.precision(i) = beta;
  }
  return out;
}

namespace {

double kl_divergence(const Eigen::MatrixXd& p, const Eigen::MatrixXd& y) {
  const Eigen::Index n = y.rows();
  Eigen::MatrixXd num(n, n);
  double z = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    num(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      num(i, j) = num(j, i) = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
      z += 2.0 * num(i, j);
    }
  }
  double kl = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) kl += p(i, j) * std::log(p(i, j) / std::max(num(i, j) / z, 1e-300));
  return kl;
}

}  // namespace

TsneResult tsne(const Eigen::MatrixXd& x, const TsneConfig& config) {
  const Eigen::Index n = x.rows();
  if (n < 4) throw ValidationError("t-SNE needs at least four points");
  if (!x.allFinite()) throw ValidationError("t-SNE input contains non-finite values");
  TsneResult out;
  out.perplexity_used = config.perplexity;
  const double max_perplexity = static_cast<double>(n - 1) / 3.0;
  if (config.perplexity > max_perplexity) {
    out.perplexity_used = max_perplexity;
    out.perplexity_clamped = true;
  }
  out.perplexity_used = std::max(out.perplexity_used, 1.0);

  const auto affinities = calibrate_affinities(squared_distances(x), out.perplexity_used);
  Eigen::MatrixXd p = (affinities.conditional + affinities.conditional.transpose()) /
                      (2.0 * static_cast<double>(n));
  p = p.cwiseMax(1e-12);
  p.diagonal().setZero();

  // Initial layout: first two principal components scaled to std 1e-4.
  Eigen::MatrixXd y(n, 2);
  bool initialised = false;
  if (x.cols() >= 2) {
    try {
      y = pca(x, 2).scores;
      const double sd = std::sqrt((y.col(0).array() - y.col(0).mean()).square().sum() /
                                  static_cast<double>(n - 1));
      if (sd > 0.0 && y.allFinite()) {
        y *= 1e-4 / sd;
        initialised = true;
      }
    } catch (const ValidationError&) {
    }
  }
  if (!initialised) {
    Rng rng(config.seed);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = 1e-4 * rng.normal();
  }
  out.kl_initial = kl_divergence(p, y);

  Eigen::MatrixXd update = Eigen::MatrixXd::Zero(n, 2);
  Eigen::MatrixXd gains = Eigen::MatrixXd::Ones(n, 2);
  Eigen::MatrixXd grad(n, 2);
  Eigen::MatrixXd num(n, n);
  for (std::size_t it = 0; it < config.iterations; ++it) {
    const bool exaggerating = it < config.exaggeration_iterations;
    const double exaggeration = exaggerating ? config.early_exaggeration : 1.0;
    const double momentum = exaggerating ? 0.5 : 0.8;
    double z = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      num(i, i) = 0.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double dx = y(i, 0) - y(j, 0), dy = y(i, 1) - y(j, 1);
        num(i, j) = num(j, i) = 1.0 / (1.0 + dx * dx + dy * dy);
        z += 2.0 * num(i, j);
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      double gx = 0.0, gy = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const double coeff = (exaggeration * p(i, j) - num(i, j) / z) * num(i, j);
        gx += coeff * (y(i, 0) - y(j, 0));
        gy += coeff * (y(i, 1) - y(j, 1));
      }
      grad(i, 0) = 4.0 * gx;
      grad(i, 1) = 4.0 * gy;
    }
    for (Eigen::Index k = 0; k < grad.size(); ++k) {
      double& g = gains.data()[k];
      const bool same_sign = (grad.data()[k] > 0.0) == (update.data()[k] > 0.0);
      g = same_sign ? g * 0.8 : g + 0.2;
      g = std::max(g, 0.01);
      update.data()[k] = momentum * update.data()[k] - config.learning_rate * g * grad.data()[k];
    }
    y += update;
    y.rowwise() -= y.colwise().mean();
  }
  out.embedding = y;
  out.kl_final = kl_divergence(p, y);
  return out;
}

std::string_view to_string(ReductionMethod m) noexcept {
  switch (m) {
    case ReductionMethod::pca: return "pca";
    case ReductionMethod::svd: return "svd";
    case ReductionMethod::nmf: return "nmf";
    case ReductionMethod::tsne: return "tsne";
  }
  return "unknown";
}

ReductionMethod parse_reduction_method(std::string_view name) {
  // "linear" is accepted as an alias for PCA.
  if (name == "pca" || name == "linear") return ReductionMethod::pca;
  if (name == "svd") return ReductionMethod::svd;
  if (name == "nmf") return ReductionMethod::nmf;
  if (name == "tsne") return ReductionMethod::tsne;
  throw ValidationError("unknown reduction method '" + std::string(name) + "'");
}

Eigen::MatrixXd reduce(const Eigen::MatrixXd& x, const ReductionConfig& config, std::string* warning) {
  if (config.target_dim < 1 || config.target_dim >= static_cast<std::size_t>(x.cols()))
    throw ValidationError("target dimension must be in [1, input dimension)");
  switch (config.method) {
    case ReductionMethod::pca: return pca(x, config.target_dim).scores;
    case ReductionMethod::svd: return truncated_svd(x, config.target_dim).scores;
    case ReductionMethod::nmf: return nmf(x, config.target_dim, config.nmf_iterations, config.tsne.seed).w;
    case ReductionMethod::tsne: {
      if (config.target_dim != 2) throw ValidationError("t-SNE embeds into two dimensions only");
      auto result = tsne(x, config.tsne);
      if (result.perplexity_clamped && warning)
        *warning = "t-SNE perplexity lowered to " + std::to_string(result.perplexity_used) +
                   " ((n - 1) / 3 for n = " + std::to_string(x.rows()) + ")";
      return result.embedding;
    }
  }
  return {};
}

}  // namespace topicdrift
