#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "test_support.hpp"
#include "topicdrift/error.hpp"
#include "topicdrift/lda.hpp"

using namespace topicdrift;
using topicdrift::fixtures::bows_of;
using topicdrift::fixtures::two_topic_corpus;

namespace {

LdaModel single_word_model() {
  const std::vector<TokenDoc> docs{{"d", Label::fake, {{"w", "w", "w", "w", "w", "w", "w"}}},
                                   {"e", Label::real, {{}}}};
  auto vocab = Vocabulary::from_columns({"v", "w"}, {0, 7}, {0, 1});
  return train_lda(bows_of(docs, vocab), vocab, {1, 0.0, 0.01, 20, 1});
}

LdaModel uniform_model(std::size_t v, std::size_t k) {
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < v; ++i) tokens.push_back("t" + std::to_string(i));
  auto vocab = Vocabulary::from_columns(tokens, std::vector<std::uint64_t>(v, 1), std::vector<std::uint64_t>(v, 1));
  return LdaModel(vocab, k, std::vector<double>(v * k, 1.0 / static_cast<double>(v)), 0.5, 0.01, 0, 0);
}

void expect_simplex(std::span<const double> p) {
  double sum = 0.0;
  for (double v : p) {
    EXPECT_GE(v, 0.0);
    sum += v;
  }
  EXPECT_NEAR(sum, 1.0, 1e-9);
}

}  // namespace

TEST(LdaTrain, ClosedFormSingleWordPhi) {
  const auto model = single_word_model();
  EXPECT_NEAR(model.phi(0, 1), (7 + 0.01) / (7 + 0.02), 1e-12);
  EXPECT_NEAR(model.phi(0, 0), 0.01 / (7 + 0.02), 1e-12);
}

TEST(LdaTrain, SingleTopicThetaIsOne) {
  const auto docs = two_topic_corpus(20, 15, 3);
  const auto vocab = Vocabulary::build(docs);
  const auto model = train_lda(bows_of(docs, vocab), vocab, {1, 0.0, 0.01, 10, 3});
  for (const auto& bow : bows_of(docs, vocab)) EXPECT_EQ(infer(model, bow, {20, 1}), TopicDistribution{1.0});
}

TEST(LdaTrain, RecoversDisjointTopics) {
  const auto docs = two_topic_corpus(200, 30, 7);
  const auto vocab = Vocabulary::build(docs);
  const auto model = train_lda(bows_of(docs, vocab), vocab, {2, 0.0, 0.01, 200, 7});
  for (std::size_t k = 0; k < 2; ++k) {
    std::set<char> halves;
    for (const auto& w : top_words(model, k, 10)) halves.insert(w[0]);
    EXPECT_EQ(halves.size(), 1u) << "topic " << k;
  }
}

TEST(LdaTrain, SimplexAndPositivity) {
  const auto docs = two_topic_corpus(60, 20, 9);
  const auto vocab = Vocabulary::build(docs);
  const auto model = train_lda(bows_of(docs, vocab), vocab, {3, 0.0, 0.01, 30, 9});
  for (std::size_t k = 0; k < 3; ++k) {
    expect_simplex(model.phi_row(k));
    for (double v : model.phi_row(k)) EXPECT_GT(v, 0.0);
  }
  for (const auto& bow : bows_of(docs, vocab)) expect_simplex(infer(model, bow, {40, 2}));
  EXPECT_EQ(model.loglik_trace().size(), 30u);
}

TEST(LdaTrain, CountConservationEverySweep) {
  const auto docs = two_topic_corpus(40, 12, 4);
  const auto vocab = Vocabulary::build(docs);
  const auto bows = bows_of(docs, vocab);
  GibbsSampler sampler(bows, vocab.size(), {3, 0.0, 0.01, 0, 4});
  for (int sweep = 0; sweep < 5; ++sweep) {
    sampler.sweep();
    for (std::size_t d = 0; d < sampler.documents(); ++d) {
      std::size_t total = 0;
      for (std::size_t k = 0; k < sampler.topics(); ++k) total += sampler.doc_topic_count(d, k);
      EXPECT_EQ(total, sampler.doc_length(d));
    }
    for (std::size_t k = 0; k < sampler.topics(); ++k) {
      std::uint64_t total = 0;
      for (std::uint32_t w = 0; w < sampler.vocab_size(); ++w) total += sampler.topic_word_count(k, w);
      EXPECT_EQ(total, sampler.topic_total(k));
    }
  }
}

TEST(LdaTrain, LogLikelihoodTrendsUp) {
  const auto docs = two_topic_corpus(200, 30, 7);
  const auto vocab = Vocabulary::build(docs);
  const auto trace = train_lda(bows_of(docs, vocab), vocab, {2, 0.0, 0.01, 100, 7}).loglik_trace();
  const double first = std::accumulate(trace.begin(), trace.begin() + 10, 0.0) / 10;
  const double last = std::accumulate(trace.end() - 10, trace.end(), 0.0) / 10;
  EXPECT_GE(last, first);
}

TEST(LdaTrain, SeedDeterminism) {
  const auto docs = two_topic_corpus(50, 20, 1);
  const auto vocab = Vocabulary::build(docs);
  const auto a = train_lda(bows_of(docs, vocab), vocab, {3, 0.0, 0.01, 20, 11});
  const auto b = train_lda(bows_of(docs, vocab), vocab, {3, 0.0, 0.01, 20, 11});
  EXPECT_EQ(a.serialize(), b.serialize());
}

TEST(LdaTrain, EmptyCorpusRejected) {
  const std::vector<TokenDoc> docs{{"d", Label::fake, {{}}}};
  const auto vocab = Vocabulary::from_columns({"x"}, {0}, {0});
  EXPECT_THROW(train_lda(bows_of(docs, vocab), vocab, {2, 0.0, 0.01, 5, 1}), ValidationError);
  EXPECT_THROW(train_lda({}, vocab, {2, 0.0, 0.01, 5, 1}), ValidationError);
}

TEST(LdaTrain, BadHyperparametersRejected) {
  const auto docs = two_topic_corpus(4, 5, 1);
  const auto vocab = Vocabulary::build(docs);
  EXPECT_THROW(train_lda(bows_of(docs, vocab), vocab, {0, 0.0, 0.01, 5, 1}), ValidationError);
  EXPECT_THROW(train_lda(bows_of(docs, vocab), vocab, {2, 0.0, 0.0, 5, 1}), ValidationError);
}

TEST(LdaInfer, EmptyBowIsUniform) {
  EXPECT_EQ(infer(uniform_model(5, 4), {}, {10, 1}), (TopicDistribution{0.25, 0.25, 0.25, 0.25}));
}

TEST(LdaInfer, PureTopicDocumentGoesToThatTopic) {
  const auto docs = two_topic_corpus(200, 30, 7);
  const auto vocab = Vocabulary::build(docs);
  const auto model = train_lda(bows_of(docs, vocab), vocab, {2, 0.0, 0.01, 200, 7});
  const std::size_t topic_a = top_words(model, 0, 1)[0][0] == 'a' ? 0 : 1;
  const auto theta = infer(model, to_bow(std::vector<std::string>{"a1", "a2", "a3", "a1", "a7"}, vocab), {100, 5});
  EXPECT_EQ(static_cast<std::size_t>(std::max_element(theta.begin(), theta.end()) - theta.begin()), topic_a);
  EXPECT_EQ(theta, infer(model, to_bow(std::vector<std::string>{"a1", "a2", "a3", "a1", "a7"}, vocab), {100, 5}));
}

TEST(LdaInfer, VocabularyMismatchRejected) {
  EXPECT_THROW(infer(uniform_model(3, 2), {{7, 1}}, {10, 1}), ValidationError);
}

TEST(TopWords, SortedWithTieBreak) {
  auto vocab = Vocabulary::from_columns({"x", "y", "z"}, {1, 1, 1}, {1, 1, 1});
  const LdaModel m(vocab, 2, {0.5, 0.3, 0.2, 0.4, 0.4, 0.2}, 0.5, 0.01, 0, 0);
  EXPECT_EQ(top_words(m, 0, 2), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(top_words(m, 1, 2), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(top_words(m, 0, 10).size(), 3u);
}

TEST(Perplexity, UniformModelEqualsV) {
  const auto model = uniform_model(8, 3);
  const std::vector<BowVector> heldout{{{0, 3}, {5, 1}}, {{7, 2}}};
  EXPECT_NEAR(perplexity(model, heldout, {20, 1}), 8.0, 1e-6);
}

TEST(Perplexity, SingleWordClosedForm) {
  const auto model = single_word_model();
  EXPECT_NEAR(perplexity(model, {{{1, 7}}}, {20, 1}), (7 + 0.02) / (7 + 0.01), 1e-9);
}

TEST(Perplexity, NoInVocabularyTokensRejected) {
  EXPECT_THROW(perplexity(uniform_model(4, 2), {{}}, {10, 1}), ValidationError);
  EXPECT_THROW(perplexity(uniform_model(4, 2), {}, {10, 1}), ValidationError);
}

TEST(Perplexity, DecreasesWithTraining) {
  const auto docs = two_topic_corpus(200, 30, 7);
  const auto vocab = Vocabulary::build(docs);
  const auto bows = bows_of(docs, vocab);
  const auto early = train_lda(bows, vocab, {2, 0.0, 0.01, 1, 7});
  const auto late = train_lda(bows, vocab, {2, 0.0, 0.01, 100, 7});
  EXPECT_LT(perplexity(late, bows, {50, 1}), perplexity(early, bows, {50, 1}));
}

TEST(ModelFile, RoundTripIsExact) {
  const auto docs = two_topic_corpus(30, 10, 2);
  const auto vocab = Vocabulary::build(docs);
  const auto model = train_lda(bows_of(docs, vocab), vocab, {2, 0.3, 0.05, 5, 2});
  const auto bytes = model.serialize();
  EXPECT_EQ(bytes.substr(0, 7), "TMDLDA1");
  const auto back = LdaModel::deserialize(bytes);
  EXPECT_EQ(back.serialize(), bytes);
  EXPECT_EQ(back.vocabulary(), model.vocabulary());
  EXPECT_EQ(back.alpha(), 0.3);
}

TEST(ModelFile, StaleVersionGivesMigrationError) {
  auto bytes = uniform_model(3, 2).serialize();
  bytes[6] = '0';
  EXPECT_THROW(LdaModel::deserialize(bytes), FormatVersionError);
  EXPECT_THROW(LdaModel::deserialize("garbage"), ParseError);
}

TEST(ModelFile, CorruptionDetected) {
  auto bytes = uniform_model(3, 2).serialize();
  bytes[20] ^= 0x5a;
  EXPECT_THROW(LdaModel::deserialize(bytes), ParseError);
}
