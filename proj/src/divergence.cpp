#include "topicdrift/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "topicdrift/error.hpp"

namespace topicdrift {

namespace {

constexpr std::pair<Measure, std::string_view> kNames[] = {
    {Measure::cosine, "cosine"},
    {Measure::chebyshev, "chebyshev"},
    {Measure::euclidean, "euclidean"},
    {Measure::hellinger, "hellinger"},
    {Measure::jensen_shannon, "jensen_shannon"},
    {Measure::kullback_leibler, "kullback_leibler"},
    {Measure::squared_euclidean, "squared_euclidean"},
};

std::vector<double> floored(std::span<const double> p, double epsilon) {
  std::vector<double> out(p.begin(), p.end());
  double sum = 0.0;
  for (double& x : out) {
    x = std::max(x, epsilon);
    sum += x;
  }
  for (double& x : out) x /= sum;
  return out;
}

double kl(std::span<const double> p, std::span<const double> q, double epsilon) {
  const auto pf = floored(p, epsilon);
  const auto qf = floored(q, epsilon);
  double sum = 0.0;
  for (std::size_t i = 0; i < pf.size(); ++i) sum += pf[i] * std::log(pf[i] / qf[i]);
  return std::max(sum, 0.0);
}

double squared_distance(std::span<const double> p, std::span<const double> q) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - q[i];
    sum += d * d;
  }
  return sum;
}

}  // namespace

std::string_view to_string(Measure m) noexcept {
  for (const auto& [kind, name] : kNames)
    if (kind == m) return name;
  return "unknown";
}

Measure parse_measure(std::string_view name) {
  for (const auto& [kind, n] : kNames)
    if (n == name) return kind;
  throw ValidationError("unknown divergence measure '" + std::string(name) + "'");
}

bool is_symmetric(Measure m) noexcept { return m != Measure::kullback_leibler; }

double divergence(const DivergenceMeasure& measure, std::span<const double> p,
                  std::span<const double> q) {
  if (p.size() != q.size()) throw ValidationError("distributions differ in length");
  if (p.empty()) throw ValidationError("distributions must be non-empty");
  if (!(measure.epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0) || !(q[i] >= 0.0) || !std::isfinite(p[i]) || !std::isfinite(q[i]))
      throw ValidationError("distribution entries must be finite and non-negative");
  }

  switch (measure.kind) {
    case Measure::cosine: {
      double dot = 0.0, pp = 0.0, qq = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        dot += p[i] * q[i];
        pp += p[i] * p[i];
        qq += q[i] * q[i];
      }
      if (pp == 0.0 || qq == 0.0) throw ValidationError("cosine distance of a zero vector");
      return std::clamp(1.0 - dot / (std::sqrt(pp) * std::sqrt(qq)), 0.0, 1.0);
    }
    case Measure::chebyshev: {
      double best = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) best = std::max(best, std::abs(p[i] - q[i]));
      return best;
    }
    case Measure::euclidean:
      return std::sqrt(squared_distance(p, q));
    case Measure::squared_euclidean:
      return squared_distance(p, q);
    case Measure::hellinger: {
      double sum = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
        sum += d * d;
      }
      return std::sqrt(sum) / std::numbers::sqrt2;
    }
    case Measure::kullback_leibler:
      return kl(p, q, measure.epsilon);
    case Measure::jensen_shannon: {
      std::vector<double> mid(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) mid[i] = 0.5 * (p[i] + q[i]);
      return 0.5 * (kl(p, mid, measure.epsilon) + kl(q, mid, measure.epsilon));
    }
  }
  return 0.0;
}

Eigen::MatrixXd pairwise_matrix(const DivergenceMeasure& measure,
                                const std::vector<std::vector<double>>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  const bool symmetric = is_symmetric(measure.kind);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = symmetric ? i + 1 : 0; j < n; ++j) {
      if (i == j) continue;
      out(i, j) = divergence(measure, rows[i], rows[j]);
      if (symmetric) out(j, i) = out(i, j);
    }
  }
  return out;
}

}  // namespace topicdrift
