#include "topicdrift/stats.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "topicdrift/error.hpp"

namespace topicdrift {

std::string_view to_string(TestMethod m) noexcept {
  switch (m) {
    case TestMethod::shapiro_wilk: return "shapiro_wilk";
    case TestMethod::mann_whitney_u: return "mann_whitney_u";
    case TestMethod::t_independent: return "t_independent";
  }
  return "unknown";
}

std::string_view to_string(Alternative a) noexcept {
  switch (a) {
    case Alternative::two_sided: return "two_sided";
    case Alternative::greater: return "greater";
    case Alternative::less: return "less";
  }
  return "unknown";
}

Alternative parse_alternative(std::string_view name) {
  if (name == "two_sided") return Alternative::two_sided;
  if (name == "greater") return Alternative::greater;
  if (name == "less") return Alternative::less;
  throw ValidationError("unknown alternative '" + std::string(name) + "'");
}

// --- distributions ---------------------------------------------------------------

namespace dist {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("normal quantile needs p in (0, 1)");
  // Acklam's rational approximation followed by one Halley step.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;
  double x;
  if (p < low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 1000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw ValidationError("incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
  return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw ValidationError("t distribution needs df > 0");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
  return t > 0.0 ? 1.0 - tail : tail;
}

}  // namespace dist

// --- descriptive -------------------------------------------------------------------

double median(std::span<const double> sample) {
  if (sample.empty()) throw ValidationError("median of an empty sample");
  std::vector<double> v(sample.begin(), sample.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Summary describe(std::span<const double> sample) {
  if (sample.empty()) throw ValidationError("cannot describe an empty sample");
  Summary s;
  s.n = sample.size();
  double sum = 0.0;
  for (double x : sample) sum += x;
  s.mean = sum / static_cast<double>(s.n);
  s.median = median(sample);
  if (s.n >= 2) {
    double ss = 0.0;
    for (double x : sample) ss += (x - s.mean) * (x - s.mean);
    s.std_dev = std::sqrt(ss / static_cast<double>(s.n - 1));
    s.ci95_half_width = 1.96 * *s.std_dev / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

// --- Shapiro-Wilk ----------------------------------------------------------------------

namespace {

// c[0] + c[1] x + c[2] x^2 + ...
template <std::size_t N>
double poly(const std::array<double, N>& c, double x) {
  double result = 0.0;
  for (std::size_t i = N; i-- > 0;) result = result * x + c[i];
  return result;
}

// Antisymmetric Shapiro-Wilk weights for the sorted sample, normalised to unit length.
std::vector<double> shapiro_wilk_weights(std::size_t n) {
  static constexpr std::array<double, 6> c1{0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
  static constexpr std::array<double, 6> c2{0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
  const std::size_t half = n / 2;
  std::vector<double> upper(half);  // weights for the largest order statistics
  if (n == 3) {
    upper[0] = std::sqrt(0.5);
  } else {
    const double an = static_cast<double>(n);
    std::vector<double> m(half);
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      m[i] = dist::normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
      summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(c1, rsn) - m[0] / ssumm2;
    std::size_t first_scaled;
    double fac;
    if (n > 5) {
      const double a2 = -m[1] / ssumm2 + poly(c2, rsn);
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) /
                      (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      upper[1] = a2;
      first_scaled = 2;
    } else {
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
      first_scaled = 1;
    }
    upper[0] = a1;
    for (std::size_t i = first_scaled; i < half; ++i) upper[i] = -m[i] / fac;
  }
  std::vector<double> a(n, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    a[n - 1 - i] = upper[i];
    a[i] = -upper[i];
  }
  return a;
}

}  // namespace

TestResult shapiro_wilk(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 3 || n > 5000) throw ValidationError("Shapiro-Wilk needs 3 <= n <= 5000");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  if (!(range > 0.0) || !std::isfinite(range))
    throw ValidationError("Shapiro-Wilk needs a sample with non-zero, finite range");

  double mean = 0.0;
  for (double v : x) mean += v / range;
  mean /= static_cast<double>(n);
  const auto a = shapiro_wilk_weights(n);
  double numerator = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double centered = x[i] / range - mean;
    numerator += a[i] * centered;
    ss += centered * centered;
  }
  const double w = std::min(1.0, numerator * numerator / ss);

  TestResult r;
  r.method = TestMethod::shapiro_wilk;
  r.statistic = w;
  r.n1 = n;
  if (n == 3) {
    constexpr double six_over_pi = 6.0 / std::numbers::pi;
    const double stqr = std::numbers::pi / 3.0;
    r.p_value = std::clamp(six_over_pi * (std::asin(std::sqrt(w)) - stqr), 0.0, 1.0);
    return r;
  }
  static constexpr std::array<double, 2> g{-2.273, 0.459};
  static constexpr std::array<double, 4> c3{0.544, -0.39978, 0.025054, -6.714e-4};
  static constexpr std::array<double, 4> c4{1.3822, -0.77857, 0.062767, -0.0020322};
  static constexpr std::array<double, 4> c5{-1.5861, -0.31082, -0.083751, 0.0038915};
  static constexpr std::array<double, 3> c6{-0.4803, -0.082676, 0.0030302};
  const double an = static_cast<double>(n);
  double y = std::log1p(-w);
  double mu, sigma;
  if (n <= 11) {
    const double gamma = poly(g, an);
    if (y >= gamma) {
      r.p_value = 1e-99;
      return r;
    }
    y = -std::log(gamma - y);
    mu = poly(c3, an);
    sigma = std::exp(poly(c4, an));
  } else {
    const double log_n = std::log(an);
    mu = poly(c5, log_n);
    sigma = std::exp(poly(c6, log_n));
  }
  r.p_value = std::clamp(dist::normal_sf((y - mu) / sigma), 0.0, 1.0);
  return r;
}

// --- Mann-Whitney ------------------------------------------------------------------------

namespace {

// Midranks (1-based) of the pooled sample plus the tie-correction sum of t^3 - t.
std::vector<double> midranks(const std::vector<double>& pooled, double& tie_term) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<double> ranks(n);
  tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y,
                          Alternative alternative) {
  if (x.empty() || y.empty()) throw ValidationError("Mann-Whitney needs two non-empty samples");
  const std::size_t n1 = x.size(), n2 = y.size(), n = n1 + n2;
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  for (double v : pooled)
    if (!std::isfinite(v)) throw ValidationError("Mann-Whitney samples must be finite");
  double tie_term = 0.0;
  const auto ranks = midranks(pooled, tie_term);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n1; ++i) rank_sum += ranks[i];
  const double n1d = static_cast<double>(n1), n2d = static_cast<double>(n2);
  const double u = rank_sum - n1d * (n1d + 1.0) / 2.0;

  TestResult r;
  r.method = TestMethod::mann_whitney_u;
  r.statistic = u;
  r.alternative = alternative;
  r.n1 = n1;
  r.n2 = n2;

  if (n <= kExactMannWhitneyLimit && tie_term == 0.0) {
    // Every assignment of n1 ranks out of 1..n to the first sample.
    const auto u_obs = static_cast<long>(std::lround(u));
    const long offset = static_cast<long>(n1 * (n1 + 1) / 2);
    std::uint64_t total = 0, at_most = 0, at_least = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) != n1) continue;
      long sum = 0;
      for (std::uint32_t bits = mask; bits; bits &= bits - 1) sum += std::countr_zero(bits) + 1;
      const long stat = sum - offset;
      ++total;
      at_most += stat <= u_obs;
      at_least += stat >= u_obs;
    }
    const double p_less = static_cast<double>(at_most) / static_cast<double>(total);
    const double p_greater = static_cast<double>(at_least) / static_cast<double>(total);
    r.exact = true;
    switch (alternative) {
      case Alternative::less: r.p_value = p_less; break;
      case Alternative::greater: r.p_value = p_greater; break;
      case Alternative::two_sided: r.p_value = std::min(1.0, 2.0 * std::min(p_less, p_greater)); break;
    }
    return r;
  }

  const double nd = static_cast<double>(n);
  const double mu = n1d * n2d / 2.0;
  const double var = n1d * n2d / 12.0 * ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
  if (!(var > 0.0)) {
    r.p_value = 1.0;  // every observation tied
    return r;
  }
  const double sigma = std::sqrt(var);
  switch (alternative) {
    case Alternative::greater:
      r.p_value = dist::normal_sf((u - mu - 0.5) / sigma);
      break;
    case Alternative::less:
      r.p_value = dist::normal_cdf((u - mu + 0.5) / sigma);
      break;
    case Alternative::two_sided: {
      const double u_big = std::max(u, n1d * n2d - u);
      r.p_value = std::min(1.0, 2.0 * dist::normal_sf((u_big - mu - 0.5) / sigma));
      break;
    }
  }
  return r;
}

// --- t-test --------------------------------------------------------------------------------

TestResult t_test_ind(std::span<const double> x, std::span<const double> y, bool equal_var,
                      Alternative alternative) {
  if (x.size() < 2 || y.size() < 2) throw ValidationError("t-test needs at least two values per sample");
  const auto sx = describe(x), sy = describe(y);
  const double n1 = static_cast<double>(sx.n), n2 = static_cast<double>(sy.n);
  const double v1 = *sx.std_dev * *sx.std_dev, v2 = *sy.std_dev * *sy.std_dev;
  double se, df;
  if (equal_var) {
    const double pooled = ((n1 - 1.0) * v1 + (n2 - 1.0) * v2) / (n1 + n2 - 2.0);
    se = std::sqrt(pooled * (1.0 / n1 + 1.0 / n2));
    df = n1 + n2 - 2.0;
  } else {
    const double a = v1 / n1, b = v2 / n2;
    se = std::sqrt(a + b);
    df = (a + b) * (a + b) / (a * a / (n1 - 1.0) + b * b / (n2 - 1.0));
  }
  if (!(se > 0.0) || !std::isfinite(se))
    throw ValidationError("t-test is undefined: both samples have zero variance");
  const double t = (sx.mean - sy.mean) / se;

  TestResult r;
  r.method = TestMethod::t_independent;
  r.statistic = t;
  r.alternative = alternative;
  r.n1 = sx.n;
  r.n2 = sy.n;
  r.degrees_of_freedom = df;
  switch (alternative) {
    case Alternative::two_sided:
      r.p_value = std::min(1.0, dist::incomplete_beta(0.5 * df, 0.5, df / (df + t * t)));
      break;
    case Alternative::greater:
      r.p_value = dist::student_t_cdf(-t, df);
      break;
    case Alternative::less:
      r.p_value = dist::student_t_cdf(t, df);
      break;
  }
  return r;
}

}  // namespace topicdrift
