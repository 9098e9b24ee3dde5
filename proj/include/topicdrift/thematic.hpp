#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "topicdrift/corpus.hpp"
#include "topicdrift/divergence.hpp"
#include "topicdrift/lda.hpp"
#include "topicdrift/stats.hpp"

namespace topicdrift {

/// Background models keyed by topic count N; all share one vocabulary.
using ModelSet = std::map<std::size_t, LdaModel>;

/// Article split into its first `l` sentences and the rest.
struct SectionedDoc {
  std::string id;
  Label label = Label::unlabeled;
  std::size_t l = 0;
  std::vector<std::string> opening_tokens;
  std::vector<std::string> remainder_tokens;
};

/// nullopt when the document has fewer than l + 1 sentences.
std::optional<SectionedDoc> section(const TokenDoc& doc, std::size_t l);

/// Fold-in seed for one bag of words under an N-topic model. It depends on the
/// tokens alone, so equal texts get equal topic distributions regardless of
/// document id, position or part.
std::uint64_t inference_seed(std::uint64_t base, std::size_t topics, const BowVector& bow) noexcept;

/// Throws unless every model shares the first model's vocabulary.
const Vocabulary& shared_vocabulary(const ModelSet& models);

struct DeviationRecord {
  std::string id;
  Label label = Label::unlabeled;
  std::map<std::size_t, double> per_n;
  double mean_over_n = 0.0;
};

struct ClassDeviation {
  std::size_t surviving = 0;
  std::size_t skipped = 0;
  /// Per-article deviations summarised at each N.
  std::map<std::size_t, Summary> per_n;
  /// Summary of per-article means over the N set.
  Summary combined;
};

struct DeviationOptions {
  InferConfig infer;
  Alternative alternative = Alternative::two_sided;
  bool equal_var = true;
  /// Also run one t-test per N (the default unit is one mean-over-N value per article).
  bool per_n_tests = false;
};

struct DeviationReport {
  DivergenceMeasure measure;
  std::size_t l = 0;
  std::vector<std::size_t> n_set;
  ClassDeviation fake;
  ClassDeviation real;
  /// Documents with labels other than fake/real, left out entirely.
  std::size_t ignored = 0;
  TestResult t_test;
  std::map<std::size_t, TestResult> per_n_tests;
  std::vector<DeviationRecord> records;
};

/// Opening-vs-remainder deviation for every fake/real article with at least
/// l + 1 sentences, under every model in `models`.
DeviationReport evaluate_deviation(const std::vector<TokenDoc>& docs, const ModelSet& models,
                                   const DivergenceMeasure& measure, std::size_t l,
                                   const DeviationOptions& options = {});

std::map<std::size_t, DeviationReport> l_sweep(const std::vector<TokenDoc>& docs,
                                               const ModelSet& models,
                                               const DivergenceMeasure& measure,
                                               std::size_t l_min = 1, std::size_t l_max = 5,
                                               const DeviationOptions& options = {});

nlohmann::json to_json(const Summary& summary);
nlohmann::json to_json(const TestResult& result);
nlohmann::json to_json(const DeviationReport& report);
/// `id,label,N...,mean_over_n` per article.
std::string deviation_records_csv(const DeviationReport& report);

}  // namespace topicdrift
