#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "topicdrift/corpus.hpp"
#include "topicdrift/lda.hpp"

namespace topicdrift {

/// Document-level (co-)occurrence counts restricted to a word set.
struct CoocCounts {
  std::size_t doc_count = 0;
  std::map<std::string, std::size_t> single;
  /// Keyed by the lexicographically ordered pair.
  std::map<std::pair<std::string, std::string>, std::size_t> pair;

  std::size_t docs_with(const std::string& w) const;
  std::size_t docs_with(const std::string& a, const std::string& b) const;
};

CoocCounts build_cooc(const std::vector<std::vector<std::string>>& docs,
                      const std::set<std::string>& restrict_to);
CoocCounts build_cooc(const std::vector<TokenDoc>& docs, const std::set<std::string>& restrict_to);

/// UMass coherence of an ordered top-word list:
///   sum_{m>l} log((D(v_m, v_l) + eps) / D(v_l)).
/// Words absent from the scoring corpus are dropped first; returns nullopt when
/// fewer than two words remain.
std::optional<double> umass_topic(const CoocCounts& cooc, const std::vector<std::string>& top_words,
                                  double epsilon = 1.0);

struct CoherenceReport {
  std::vector<std::vector<std::string>> top_words;
  std::vector<std::optional<double>> scores;
  /// Mean over defined scores.
  double mean = 0.0;
};

/// Scores every topic's top-`top_m` words against `docs`. Throws when no topic
/// has a defined score.
CoherenceReport umass_model(const LdaModel& model, const std::vector<TokenDoc>& docs,
                            std::size_t top_m = 10, double epsilon = 1.0);

/// `topic_index,score,top_words` rows plus a `mean` footer row.
std::string coherence_csv(const CoherenceReport& report);

}  // namespace topicdrift
