#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "topicdrift/corpus.hpp"
#include "topicdrift/lda.hpp"
#include "topicdrift/rng.hpp"
#include "topicdrift/synth.hpp"
#include "topicdrift/thematic.hpp"

namespace topicdrift::fixtures {

/// Two planted topics over disjoint 10-word vocabularies: topic 0 uses a0..a9,
/// topic 1 uses b0..b9. Each document draws all its words from one topic.
inline std::vector<TokenDoc> two_topic_corpus(std::size_t docs, std::size_t words_per_doc, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TokenDoc> out;
  for (std::size_t d = 0; d < docs; ++d) {
    const char prefix = d % 2 == 0 ? 'a' : 'b';
    TokenDoc doc{"d" + std::to_string(d), d % 2 == 0 ? Label::fake : Label::real, {{}}};
    for (std::size_t i = 0; i < words_per_doc; ++i)
      doc.sentences[0].push_back(std::string(1, prefix) + std::to_string(rng.below(10)));
    out.push_back(std::move(doc));
  }
  return out;
}

inline std::vector<BowVector> bows_of(const std::vector<TokenDoc>& docs, const Vocabulary& vocab) {
  std::vector<BowVector> out;
  for (const auto& d : docs) out.push_back(to_bow(d, vocab));
  return out;
}

/// Random point on the (m-1)-simplex.
inline std::vector<double> random_simplex(Rng& rng, std::size_t m) {
  std::vector<double> p(m);
  double total = 0.0;
  for (auto& v : p) {
    v = -std::log(1.0 - rng.uniform());
    total += v;
  }
  for (auto& v : p) v /= total;
  return p;
}

inline std::vector<TokenDoc> synth_tokens(const SynthSpec& spec) {
  return preprocess_corpus(generate(spec).corpus, PreprocessConfig::with_default_stopwords());
}

/// One model per N, all on the vocabulary of `docs`.
inline ModelSet train_models(const std::vector<TokenDoc>& docs, const std::vector<std::size_t>& ns,
                             std::size_t iterations, std::uint64_t seed) {
  const auto vocab = Vocabulary::build(docs);
  const auto bows = bows_of(docs, vocab);
  ModelSet models;
  for (std::size_t n : ns) {
    LdaParams params;
    params.topics = n;
    params.iterations = iterations;
    params.seed = derive_seed(seed, n);
    models.emplace(n, train_lda(bows, vocab, params));
  }
  return models;
}

}  // namespace topicdrift::fixtures
