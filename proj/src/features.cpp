#include "topicdrift/features.hpp"

#include <algorithm>
#include <cstdlib>

#include "topicdrift/error.hpp"
#include "topicdrift/io.hpp"
#include "topicdrift/parallel.hpp"
#include "topicdrift/rng.hpp"

namespace topicdrift {

namespace {

const LdaModel& model_for(const ModelSet& models, std::size_t n) {
  const auto it = models.find(n);
  if (it == models.end()) throw ValidationError("no topic model for N=" + std::to_string(n));
  return it->second;
}

void append_theta(std::vector<double>& out, const LdaModel& model,
                  const std::vector<std::string>& tokens, const InferConfig& infer) {
  const auto bow = to_bow(tokens, model.vocabulary());
  const auto theta =
      topicdrift::infer(model, bow, {infer.iterations, inference_seed(infer.seed, model.topics(), bow)});
  out.insert(out.end(), theta.begin(), theta.end());
}

}  // namespace

std::string_view to_string(FeatureVariant v) noexcept {
  switch (v) {
    case FeatureVariant::aggregate300: return "aggregate300";
    case FeatureVariant::wholedoc150: return "wholedoc150";
    case FeatureVariant::singleN: return "singleN";
    case FeatureVariant::reduced2d: return "reduced2d";
  }
  return "unknown";
}

FeatureVariant parse_feature_variant(std::string_view name) {
  for (auto v : {FeatureVariant::aggregate300, FeatureVariant::wholedoc150, FeatureVariant::singleN,
                 FeatureVariant::reduced2d})
    if (to_string(v) == name) return v;
  throw ValidationError("unknown feature variant '" + std::string(name) + "'");
}

std::vector<int> FeatureMatrix::binary_labels() const {
  std::vector<int> y;
  y.reserve(labels.size());
  for (auto label : labels) {
    if (label != Label::fake && label != Label::real)
      throw ValidationError("binary tasks need fake/real labels, found '" +
                            std::string(to_string(label)) + "'");
    y.push_back(label == Label::fake ? 1 : 0);
  }
  return y;
}

std::vector<double> aggregate_features(const SectionedDoc& doc, const ModelSet& models,
                                       const std::vector<std::size_t>& ns, const InferConfig& infer) {
  std::vector<double> out;
  for (std::size_t n : ns)
    append_theta(out, model_for(models, n), doc.opening_tokens, infer);
  for (std::size_t n : ns)
    append_theta(out, model_for(models, n), doc.remainder_tokens, infer);
  return out;
}

std::vector<double> wholedoc_features(const TokenDoc& doc, const ModelSet& models,
                                      const std::vector<std::size_t>& ns, const InferConfig& infer) {
  std::vector<double> out;
  const auto tokens = doc.flatten();
  for (std::size_t n : ns)
    append_theta(out, model_for(models, n), tokens, infer);
  return out;
}

std::vector<double> single_n_features(const SectionedDoc& doc, const LdaModel& model,
                                      const InferConfig& infer) {
  std::vector<double> out;
  append_theta(out, model, doc.opening_tokens, infer);
  append_theta(out, model, doc.remainder_tokens, infer);
  return out;
}

FeatureMatrix build_features(FeatureVariant variant, const std::vector<TokenDoc>& docs,
                             const ModelSet& models, const std::vector<std::size_t>& ns,
                             std::size_t l, const InferConfig& infer) {
  if (variant == FeatureVariant::reduced2d)
    throw ValidationError("reduced features come from the reduce step, not from topic models");
  if (ns.empty()) throw ValidationError("no topic counts given");
  if (variant == FeatureVariant::singleN && ns.size() != 1)
    throw ValidationError("singleN features take exactly one topic count");
  for (std::size_t n : ns) model_for(models, n);
  shared_vocabulary(models);

  std::vector<std::size_t> kept_index;
  std::vector<SectionedDoc> sections;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (auto s = section(docs[i], l)) {
      kept_index.push_back(i);
      sections.push_back(std::move(*s));
    }
  }
  std::size_t dim = 0;
  for (std::size_t n : ns) dim += n;
  if (variant != FeatureVariant::wholedoc150) dim *= 2;

  FeatureMatrix out;
  out.variant = variant;
  out.rows.resize(static_cast<Eigen::Index>(sections.size()), static_cast<Eigen::Index>(dim));
  std::vector<std::vector<double>> rows(sections.size());
  parallel_for(sections.size(), [&](std::size_t r) {
    switch (variant) {
      case FeatureVariant::aggregate300:
        rows[r] = aggregate_features(sections[r], models, ns, infer);
        break;
      case FeatureVariant::wholedoc150:
        rows[r] = wholedoc_features(docs[kept_index[r]], models, ns, infer);
        break;
      case FeatureVariant::singleN:
        rows[r] = single_n_features(sections[r], model_for(models, ns.front()), infer);
        break;
      case FeatureVariant::reduced2d:
        break;
    }
  });
  for (std::size_t r = 0; r < sections.size(); ++r) {
    for (std::size_t c = 0; c < dim; ++c)
      out.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    out.ids.push_back(sections[r].id);
    out.labels.push_back(sections[r].label);
  }
  return out;
}

FeatureMatrix balance_classes(const FeatureMatrix& features, std::uint64_t seed) {
  std::vector<std::size_t> fake, real;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features.labels[i] == Label::fake) fake.push_back(i);
    else if (features.labels[i] == Label::real) real.push_back(i);
  }
  auto& bigger = fake.size() > real.size() ? fake : real;
  const std::size_t target = std::min(fake.size(), real.size());
  Rng rng(seed);
  rng.shuffle(bigger);
  bigger.resize(target);
  std::vector<std::size_t> keep(fake);
  keep.insert(keep.end(), real.begin(), real.end());
  std::sort(keep.begin(), keep.end());

  FeatureMatrix out;
  out.variant = features.variant;
  out.rows.resize(static_cast<Eigen::Index>(keep.size()), features.rows.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    out.rows.row(static_cast<Eigen::Index>(r)) = features.rows.row(static_cast<Eigen::Index>(keep[r]));
    out.ids.push_back(features.ids[keep[r]]);
    out.labels.push_back(features.labels[keep[r]]);
  }
  return out;
}

std::string features_csv(const FeatureMatrix& features) {
  std::string out = "id,label";
  for (std::size_t c = 0; c < features.dim(); ++c) out += ",f" + std::to_string(c);
  out += '\n';
  for (std::size_t r = 0; r < features.size(); ++r) {
    out += io::csv_escape(features.ids[r]) + ',' + std::string(to_string(features.labels[r]));
    for (std::size_t c = 0; c < features.dim(); ++c)
      out += ',' + io::format_double(features.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    out += '\n';
  }
  return out;
}

FeatureMatrix parse_features_csv(std::string_view contents, FeatureVariant variant) {
  const auto records = io::parse_csv(contents);
  if (records.empty()) throw ParseError("empty feature file", 1);
  const auto& header = records.front().fields;
  if (header.size() < 3 || header[0] != "id" || header[1] != "label")
    throw ParseError("feature header must be id,label,f0,...", 1);
  const std::size_t dim = header.size() - 2;
  for (std::size_t c = 0; c < dim; ++c)
    if (header[c + 2] != "f" + std::to_string(c)) throw ParseError("unexpected feature column name", 1);

  FeatureMatrix out;
  out.variant = variant;
  out.rows.resize(static_cast<Eigen::Index>(records.size() - 1), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) throw ParseError("wrong number of feature columns", rec.line);
    out.ids.push_back(rec.fields[0]);
    try {
      out.labels.push_back(parse_label(rec.fields[1]));
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), rec.line);
    }
    for (std::size_t c = 0; c < dim; ++c) {
      const std::string& field = rec.fields[c + 2];
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (field.empty() || end != field.c_str() + field.size())
        throw ParseError("non-numeric feature value '" + field + "'", rec.line);
      out.rows(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return out;
}

}  // namespace topicdrift
