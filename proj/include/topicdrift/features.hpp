#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "topicdrift/thematic.hpp"

namespace topicdrift {

enum class FeatureVariant { aggregate300, wholedoc150, singleN, reduced2d };

std::string_view to_string(FeatureVariant v) noexcept;
FeatureVariant parse_feature_variant(std::string_view name);

/// Topic counts stacked by the aggregate and whole-document representations.
inline const std::vector<std::size_t> kAggregateTopicCounts{10, 20, 30, 40, 50};

struct FeatureMatrix {
  FeatureVariant variant = FeatureVariant::aggregate300;
  Eigen::MatrixXd rows;
  std::vector<std::string> ids;
  std::vector<Label> labels;

  std::size_t size() const noexcept { return ids.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(rows.cols()); }
  /// 1 for fake, 0 for real; throws on any other label.
  std::vector<int> binary_labels() const;
};

/// [opening theta_N for N in ns ... | remainder theta_N for N in ns ...]
std::vector<double> aggregate_features(const SectionedDoc& doc, const ModelSet& models,
                                       const std::vector<std::size_t>& ns, const InferConfig& infer);

/// [theta_N of the whole document for N in ns]
std::vector<double> wholedoc_features(const TokenDoc& doc, const ModelSet& models,
                                      const std::vector<std::size_t>& ns, const InferConfig& infer);

/// [opening theta_N | remainder theta_N]
std::vector<double> single_n_features(const SectionedDoc& doc, const LdaModel& model,
                                      const InferConfig& infer);

/// Builds one row per document with at least l + 1 sentences, in corpus order.
/// For singleN, `ns` must hold exactly one topic count.
FeatureMatrix build_features(FeatureVariant variant, const std::vector<TokenDoc>& docs,
                             const ModelSet& models, const std::vector<std::size_t>& ns,
                             std::size_t l, const InferConfig& infer);

/// Subsamples the larger of the fake/real classes without replacement so both
/// have the smaller class's size. Row order is preserved.
FeatureMatrix balance_classes(const FeatureMatrix& features, std::uint64_t seed);

/// `id,label,f0..f{dim-1}` with 17 significant digits.
std::string features_csv(const FeatureMatrix& features);
FeatureMatrix parse_features_csv(std::string_view contents, FeatureVariant variant);

}  // namespace topicdrift
