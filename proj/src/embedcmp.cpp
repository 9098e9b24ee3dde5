#include "topicdrift/embedcmp.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "topicdrift/error.hpp"
#include "topicdrift/io.hpp"
#include "topicdrift/parallel.hpp"

namespace topicdrift {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

double parse_number(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ParseError("invalid number '" + std::string(s) + "'", line);
  return v;
}

template <typename Fn>
void for_each_line(std::string_view contents, Fn&& fn) {
  std::size_t line = 0;
  std::size_t start = 0;
  while (start < contents.size()) {
    auto end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    ++line;
    const auto text = trim(contents.substr(start, end - start));
    if (!text.empty()) fn(text, line);
    start = end + 1;
  }
}

}  // namespace

std::string_view to_string(Group g) noexcept { return g == Group::rumour ? "rumour" : "nonrumour"; }

Group parse_group(std::string_view name) {
  if (name == "rumour" || name == "rumor") return Group::rumour;
  if (name == "nonrumour" || name == "nonrumor" || name == "non-rumour") return Group::nonrumour;
  throw ValidationError("unknown group '" + std::string(name) + "' (expected rumour or nonrumour)");
}

Eigen::MatrixXd EmbeddingSet::rows_of(Group g) const {
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < groups.size(); ++i)
    if (groups[i] == g) rows.push_back(static_cast<Eigen::Index>(i));
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), vectors.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = vectors.row(rows[r]);
  return out;
}

EmbeddingSet parse_embeddings(std::string_view contents) {
  EmbeddingSet set;
  std::vector<std::vector<double>> rows;
  bool header = true;
  for_each_line(contents, [&](std::string_view text, std::size_t line) {
    const auto fields = split(text, '\t');
    if (fields.size() != 3) throw ParseError("expected 3 tab-separated fields", line);
    if (header) {
      const double dim = parse_number(fields[2], line);
      if (dim < 1 || dim != std::floor(dim)) throw ParseError("dimension must be a positive integer", line);
      set.dim = static_cast<std::size_t>(dim);
      header = false;
      return;
    }
    std::vector<double> values;
    for (auto part : split(fields[2], ' ')) {
      if (!part.empty()) values.push_back(parse_number(part, line));
    }
    if (values.size() != set.dim)
      throw ParseError("vector has " + std::to_string(values.size()) + " components, expected " +
                           std::to_string(set.dim),
                       line);
    set.ids.emplace_back(fields[0]);
    set.groups.push_back(parse_group(fields[1]));
    rows.push_back(std::move(values));
  });
  if (header) throw ParseError("missing header line", 1);
  set.vectors.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(set.dim));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < set.dim; ++c)
      set.vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return set;
}

EmbeddingSet load_embeddings(const std::filesystem::path& path) { return parse_embeddings(io::read_file(path)); }

GroupScores parse_scores(std::string_view contents) {
  GroupScores out;
  bool first = true;
  for_each_line(contents, [&](std::string_view text, std::size_t line) {
    const auto fields = split(text, '\t');
    if (fields.size() != 3) throw ParseError("expected 3 tab-separated fields", line);
    const bool is_header = first && fields[0] == "id";
    first = false;
    if (is_header) return;
    const double score = parse_number(fields[2], line);
    (parse_group(fields[1]) == Group::rumour ? out.rumour : out.nonrumour).push_back(score);
  });
  return out;
}

Eigen::VectorXd mean_pairwise_cosim(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  if (n < 2) throw ValidationError("mean pairwise similarity needs at least two vectors");
  Eigen::VectorXd norms = m.rowwise().norm();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(norms(i) > 0.0)) throw ValidationError("row " + std::to_string(i) + " is a zero vector");
  Eigen::VectorXd out(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t idx) {
    const auto i = static_cast<Eigen::Index>(idx);
    double total = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) total += m.row(i).dot(m.row(j)) / (norms(i) * norms(j));
    }
    out(i) = total / static_cast<double>(n - 1);
  });
  return out;
}

GroupComparison group_delta(const Eigen::MatrixXd& rumour, const Eigen::MatrixXd& nonrumour,
                            Alternative alternative) {
  if (rumour.rows() < 2 || nonrumour.rows() < 2) throw ValidationError("each group needs at least two vectors");
  if (rumour.cols() != nonrumour.cols()) throw ValidationError("groups have different dimensions");
  const Eigen::VectorXd r = mean_pairwise_cosim(rumour);
  const Eigen::VectorXd f = mean_pairwise_cosim(nonrumour);
  const std::span<const double> rs(r.data(), static_cast<std::size_t>(r.size()));
  const std::span<const double> fs(f.data(), static_cast<std::size_t>(f.size()));
  GroupComparison out;
  out.mean_rumour = r.mean();
  out.mean_nonrumour = f.mean();
  out.delta_mean = out.mean_rumour - out.mean_nonrumour;
  out.median_rumour = median(rs);
  out.median_nonrumour = median(fs);
  out.delta_median = out.median_rumour - out.median_nonrumour;
  out.test = mann_whitney_u(rs, fs, alternative);
  return out;
}

AffinityMetric parse_affinity_metric(std::string_view name) {
  if (name == "cosine" || name == "cosine_similarity") return AffinityMetric::cosine_similarity;
  if (name == "euclidean") return AffinityMetric::euclidean;
  throw ValidationError("unknown affinity metric '" + std::string(name) + "'");
}

std::string_view to_string(AffinityMetric m) noexcept {
  return m == AffinityMetric::cosine_similarity ? "cosine_similarity" : "euclidean";
}

double post_comment_affinity(const Eigen::VectorXd& post, const Eigen::MatrixXd& comments, AffinityMetric metric) {
  if (comments.rows() < 1) throw ValidationError("no comments");
  if (comments.cols() != post.size()) throw ValidationError("post and comments have different dimensions");
  double total = 0.0;
  if (metric == AffinityMetric::euclidean) {
    for (Eigen::Index i = 0; i < comments.rows(); ++i) total += (comments.row(i).transpose() - post).norm();
  } else {
    const double pn = post.norm();
    if (!(pn > 0.0)) throw ValidationError("post is a zero vector");
    for (Eigen::Index i = 0; i < comments.rows(); ++i) {
      const double cn = comments.row(i).norm();
      if (!(cn > 0.0)) throw ValidationError("comment " + std::to_string(i) + " is a zero vector");
      total += comments.row(i).dot(post) / (pn * cn);
    }
  }
  return total / static_cast<double>(comments.rows());
}

ScoreComparison score_group_compare(std::span<const double> a, std::span<const double> b, Alternative alternative) {
  if (a.size() < 2 || b.size() < 2) throw ValidationError("each group needs at least two scores");
  ScoreComparison out;
  out.a = describe(a);
  out.b = describe(b);
  out.delta_mean = out.a.mean - out.b.mean;
  out.delta_median = out.a.median - out.b.median;
  out.mann_whitney = mann_whitney_u(a, b, alternative);
  out.t_test = t_test_ind(a, b, true, alternative);
  return out;
}

}  // namespace topicdrift
