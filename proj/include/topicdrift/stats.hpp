#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace topicdrift {

enum class TestMethod { shapiro_wilk, mann_whitney_u, t_independent };
enum class Alternative { two_sided, greater, less };

std::string_view to_string(TestMethod m) noexcept;
std::string_view to_string(Alternative a) noexcept;
Alternative parse_alternative(std::string_view name);

struct TestResult {
  TestMethod method = TestMethod::t_independent;
  /// W, U (for the first sample) or t.
  double statistic = 0.0;
  double p_value = 1.0;
  Alternative alternative = Alternative::two_sided;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  /// Mann-Whitney only: p from the full permutation distribution.
  bool exact = false;
  /// t-test only.
  double degrees_of_freedom = 0.0;
};

/// Shapiro-Wilk normality test with Royston's (1995) coefficient and p-value
/// approximations. Requires 3 <= n <= 5000 and a non-zero range.
TestResult shapiro_wilk(std::span<const double> sample);

/// Wilcoxon-Mann-Whitney rank-sum test. `greater` means x tends to exceed y.
/// Exact when n1 + n2 <= kExactMannWhitneyLimit and there are no ties; otherwise
/// the tie-corrected normal approximation with continuity correction.
TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y,
                          Alternative alternative = Alternative::two_sided);
inline constexpr std::size_t kExactMannWhitneyLimit = 16;

/// Independent-samples t-test: pooled (Student) when `equal_var`, else Welch.
TestResult t_test_ind(std::span<const double> x, std::span<const double> y, bool equal_var = true,
                      Alternative alternative = Alternative::two_sided);

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  /// Sample standard deviation and 1.96 * std / sqrt(n); absent for n < 2.
  std::optional<double> std_dev;
  std::optional<double> ci95_half_width;
};

Summary describe(std::span<const double> sample);
double median(std::span<const double> sample);

namespace dist {

double normal_cdf(double z);
/// Upper tail 1 - Phi(z), accurate for large z.
double normal_sf(double z);
/// Inverse of the standard normal CDF, p in (0, 1).
double normal_quantile(double p);
/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
double student_t_cdf(double t, double df);

}  // namespace dist

}  // namespace topicdrift
