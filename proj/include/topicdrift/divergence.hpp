#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace topicdrift {

enum class Measure {
  cosine,
  chebyshev,
  euclidean,
  hellinger,
  jensen_shannon,
  kullback_leibler,
  squared_euclidean,
};

inline constexpr Measure kAllMeasures[] = {
    Measure::cosine,         Measure::chebyshev,        Measure::euclidean,
    Measure::hellinger,      Measure::jensen_shannon,   Measure::kullback_leibler,
    Measure::squared_euclidean,
};

std::string_view to_string(Measure m) noexcept;
/// Accepts the lowercase enum names exactly.
Measure parse_measure(std::string_view name);
bool is_symmetric(Measure m) noexcept;

struct DivergenceMeasure {
  Measure kind = Measure::chebyshev;
  /// Floor applied to both arguments of KL (and hence JS) before renormalising.
  double epsilon = 1e-12;
};

/// Distance between two distributions of equal length. Natural logarithms.
///   cosine            1 - p.q / (|p||q|)
///   chebyshev         max |p_i - q_i|
///   euclidean         |p - q|
///   squared_euclidean |p - q|^2
///   hellinger         |sqrt(p) - sqrt(q)| / sqrt(2)
///   kullback_leibler  sum p_i log(p_i / q_i), arguments floored and renormalised
///   jensen_shannon    (KL(p||z) + KL(q||z)) / 2 with z = (p + q) / 2
double divergence(const DivergenceMeasure& measure, std::span<const double> p,
                  std::span<const double> q);

inline double divergence(Measure kind, std::span<const double> p, std::span<const double> q) {
  return divergence(DivergenceMeasure{kind}, p, q);
}

/// Entry (i, j) = divergence(rows[i], rows[j]).
Eigen::MatrixXd pairwise_matrix(const DivergenceMeasure& measure,
                                const std::vector<std::vector<double>>& rows);

}  // namespace topicdrift
