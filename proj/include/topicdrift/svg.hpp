#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace topicdrift::svg {

/// Five-number summary with Tukey whiskers (1.5 IQR); quartiles by linear
/// interpolation between order statistics.
struct BoxStats {
  double q1 = 0.0, median = 0.0, q3 = 0.0;
  double whisker_low = 0.0, whisker_high = 0.0;
  std::vector<double> outliers;
};

BoxStats box_stats(std::vector<double> values);

/// One box per (category, series); values[c][s] holds the sample for category c
/// and series s.
std::string box_plot(const std::string& title, const std::vector<std::string>& categories,
                     const std::vector<std::string>& series,
                     const std::vector<std::vector<std::vector<double>>>& values);

/// 2-D scatter coloured by label (first two columns of `points`).
std::string scatter(const std::string& title, const Eigen::MatrixXd& points,
                    const std::vector<std::string>& labels);

}  // namespace topicdrift::svg
