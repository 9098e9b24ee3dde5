#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"
#include "topicdrift/error.hpp"
#include "topicdrift/synth.hpp"

using namespace topicdrift;

namespace {

std::size_t word_index(std::string token) {
  return static_cast<std::size_t>(std::stoul(token.substr(1)));
}

}  // namespace

TEST(Synth, WordNames) {
  EXPECT_EQ(synth_word(7, 200), "w007");
  EXPECT_EQ(synth_word(1234, 5000), "w1234");
  EXPECT_EQ(synth_word(3, 10), "w003");
}

TEST(Synth, ClassCountsAndOrder) {
  SynthSpec spec;
  spec.docs_per_class = 25;
  const auto s = generate(spec);
  ASSERT_EQ(s.corpus.size(), 50u);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(s.corpus[i].label, i < 25 ? Label::fake : Label::real);
}

TEST(Synth, Deterministic) {
  SynthSpec spec;
  spec.docs_per_class = 10;
  spec.seed = 99;
  EXPECT_EQ(corpus_to_jsonl(generate(spec).corpus), corpus_to_jsonl(generate(spec).corpus));
  auto other = spec;
  other.seed = 100;
  EXPECT_NE(corpus_to_jsonl(generate(spec).corpus), corpus_to_jsonl(generate(other).corpus));
}

TEST(Synth, PlantedTopicsFollowDriftProbabilities) {
  SynthSpec spec;
  spec.docs_per_class = 50;
  const auto s = generate(spec);
  for (std::size_t i = 0; i < 100; ++i) {
    const auto& p = s.planted[i];
    if (i < 50) EXPECT_NE(p.opening_topic, p.remainder_topic);
    else EXPECT_EQ(p.opening_topic, p.remainder_topic);
  }
}

TEST(Synth, WordsComeMostlyFromPlantedSlices) {
  SynthSpec spec;
  spec.docs_per_class = 40;
  spec.seed = 3;
  const auto s = generate(spec);
  const auto docs = preprocess_corpus(s.corpus, PreprocessConfig::with_default_stopwords());
  std::size_t in_slice = 0, total = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    ASSERT_EQ(docs[d].sentences.size(), spec.sentences_per_doc);
    for (std::size_t sn = 0; sn < docs[d].sentences.size(); ++sn) {
      const std::size_t topic = sn < spec.opening_sentences ? s.planted[d].opening_topic : s.planted[d].remainder_topic;
      const auto [lo, hi] = synth_slice(spec, topic);
      for (const auto& token : docs[d].sentences[sn]) {
        const auto w = word_index(token);
        in_slice += w >= lo && w < hi;
        ++total;
      }
    }
  }
  // Expected in-slice share: 0.9 + 0.1 * (50 / 200).
  EXPECT_NEAR(static_cast<double>(in_slice) / static_cast<double>(total), 0.925, 0.01);
}

TEST(Synth, SignatureSlicesAreClassSpecific) {
  SynthSpec spec;
  spec.docs_per_class = 30;
  spec.class_signature_mass = 0.5;
  const auto s = generate(spec);
  const auto docs = preprocess_corpus(s.corpus, PreprocessConfig::with_default_stopwords());
  const auto fake_slice = synth_slice(spec, spec.topics), real_slice = synth_slice(spec, spec.topics + 1);
  for (const auto& doc : docs) {
    std::size_t own = 0, other = 0;
    const auto& mine = doc.label == Label::fake ? fake_slice : real_slice;
    const auto& theirs = doc.label == Label::fake ? real_slice : fake_slice;
    for (const auto& token : doc.flatten()) {
      const auto w = word_index(token);
      own += w >= mine.first && w < mine.second;
      other += w >= theirs.first && w < theirs.second;
    }
    EXPECT_GT(own, 5 * other);
  }
}

TEST(Synth, PassesSentenceFilter) {
  SynthSpec spec;
  spec.docs_per_class = 10;
  spec.sentences_per_doc = 6;
  const auto docs = fixtures::synth_tokens(spec);
  for (const auto& d : docs) EXPECT_TRUE(section(d, 5).has_value());
}

TEST(Synth, RejectsInfeasibleSpecs) {
  SynthSpec spec;
  spec.vocab_size = 7;
  EXPECT_THROW(generate(spec), ValidationError);
  spec = {};
  spec.topics = 1;
  EXPECT_THROW(generate(spec), ValidationError);
  spec = {};
  spec.opening_sentences = 11;
  EXPECT_THROW(generate(spec), ValidationError);
  spec = {};
  spec.drift_prob = 1.5;
  EXPECT_THROW(generate(spec), ValidationError);
}
