#include "topicdrift/coherence.hpp"

#include <cmath>

#include "topicdrift/error.hpp"
#include "topicdrift/io.hpp"

namespace topicdrift {

std::size_t CoocCounts::docs_with(const std::string& w) const {
  const auto it = single.find(w);
  return it == single.end() ? 0 : it->second;
}

std::size_t CoocCounts::docs_with(const std::string& a, const std::string& b) const {
  const auto it = pair.find(a < b ? std::pair{a, b} : std::pair{b, a});
  return it == pair.end() ? 0 : it->second;
}

CoocCounts build_cooc(const std::vector<std::vector<std::string>>& docs,
                      const std::set<std::string>& restrict_to) {
  CoocCounts cooc;
  cooc.doc_count = docs.size();
  for (const auto& doc : docs) {
    std::set<std::string> present;
    for (const auto& token : doc)
      if (restrict_to.contains(token)) present.insert(token);
    for (auto a = present.begin(); a != present.end(); ++a) {
      ++cooc.single[*a];
      for (auto b = std::next(a); b != present.end(); ++b) ++cooc.pair[{*a, *b}];
    }
  }
  return cooc;
}

CoocCounts build_cooc(const std::vector<TokenDoc>& docs, const std::set<std::string>& restrict_to) {
  std::vector<std::vector<std::string>> flat;
  flat.reserve(docs.size());
  for (const auto& doc : docs) flat.push_back(doc.flatten());
  return build_cooc(flat, restrict_to);
}

std::optional<double> umass_topic(const CoocCounts& cooc, const std::vector<std::string>& top_words,
                                  double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("coherence epsilon must be > 0");
  std::vector<const std::string*> words;
  for (const auto& w : top_words)
    if (cooc.docs_with(w) > 0) words.push_back(&w);
  if (words.size() < 2) return std::nullopt;
  double score = 0.0;
  for (std::size_t m = 1; m < words.size(); ++m) {
    for (std::size_t l = 0; l < m; ++l) {
      const double joint = static_cast<double>(cooc.docs_with(*words[m], *words[l]));
      score += std::log((joint + epsilon) / static_cast<double>(cooc.docs_with(*words[l])));
    }
  }
  return score;
}

CoherenceReport umass_model(const LdaModel& model, const std::vector<TokenDoc>& docs,
                            std::size_t top_m, double epsilon) {
  if (top_m < 2) throw ValidationError("coherence needs at least two top words");
  CoherenceReport report;
  std::set<std::string> restrict_to;
  for (std::size_t k = 0; k < model.topics(); ++k) {
    report.top_words.push_back(top_words(model, k, top_m));
    restrict_to.insert(report.top_words.back().begin(), report.top_words.back().end());
  }
  const auto cooc = build_cooc(docs, restrict_to);
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& words : report.top_words) {
    report.scores.push_back(umass_topic(cooc, words, epsilon));
    if (report.scores.back()) {
      sum += *report.scores.back();
      ++defined;
    }
  }
  if (defined == 0) throw ValidationError("coherence is undefined for every topic");
  report.mean = sum / static_cast<double>(defined);
  return report;
}

std::string coherence_csv(const CoherenceReport& report) {
  std::string out = "topic_index,score,top_words\n";
  for (std::size_t k = 0; k < report.scores.size(); ++k) {
    std::string words;
    for (const auto& w : report.top_words[k]) {
      if (!words.empty()) words += ' ';
      words += w;
    }
    out += std::to_string(k) + ',' +
           (report.scores[k] ? io::format_double(*report.scores[k]) : std::string("undefined")) +
           ',' + io::csv_escape(words) + '\n';
  }
  out += "mean," + io::format_double(report.mean) + ",\n";
  return out;
}

}  // namespace topicdrift
