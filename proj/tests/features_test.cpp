#include <gtest/gtest.h>

#include "test_support.hpp"
#include "topicdrift/error.hpp"
#include "topicdrift/features.hpp"

using namespace topicdrift;
using topicdrift::fixtures::synth_tokens;
using topicdrift::fixtures::train_models;

namespace {

const std::vector<std::size_t> kNs{3, 5};
const InferConfig kInfer{40, 17};

class Features : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    SynthSpec spec;
    spec.docs_per_class = 20;
    spec.seed = 2;
    docs_ = new std::vector<TokenDoc>(synth_tokens(spec));
    models_ = new ModelSet(train_models(*docs_, kNs, 60, 4));
  }
  static void TearDownTestSuite() {
    delete docs_;
    delete models_;
  }
  static std::vector<TokenDoc>* docs_;
  static ModelSet* models_;
};
std::vector<TokenDoc>* Features::docs_ = nullptr;
ModelSet* Features::models_ = nullptr;

void expect_simplex_blocks(const Eigen::RowVectorXd& row, const std::vector<std::size_t>& blocks) {
  Eigen::Index at = 0;
  for (std::size_t b : blocks) {
    const auto block = row.segment(at, static_cast<Eigen::Index>(b));
    EXPECT_NEAR(block.sum(), 1.0, 1e-9);
    EXPECT_GE(block.minCoeff(), 0.0);
    at += static_cast<Eigen::Index>(b);
  }
  EXPECT_EQ(at, row.size());
}

}  // namespace

TEST_F(Features, AggregateLayout) {
  const auto f = build_features(FeatureVariant::aggregate300, *docs_, *models_, kNs, 5, kInfer);
  ASSERT_EQ(f.size(), 40u);
  EXPECT_EQ(f.dim(), 16u);
  for (Eigen::Index r = 0; r < f.rows.rows(); ++r) expect_simplex_blocks(f.rows.row(r), {3, 5, 3, 5});
}

TEST_F(Features, WholeDocLayoutAndDefinition) {
  const auto f = build_features(FeatureVariant::wholedoc150, *docs_, *models_, kNs, 5, kInfer);
  EXPECT_EQ(f.dim(), 8u);
  for (Eigen::Index r = 0; r < f.rows.rows(); ++r) expect_simplex_blocks(f.rows.row(r), {3, 5});
  // Whole-document features equal inference on the unsplit token list.
  const auto& doc = (*docs_)[3];
  const auto row = wholedoc_features(doc, *models_, kNs, kInfer);
  const auto& model = models_->at(3);
  const auto bow = to_bow(doc.flatten(), model.vocabulary());
  const auto theta = infer(model, bow, {kInfer.iterations, inference_seed(kInfer.seed, 3, bow)});
  for (std::size_t k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(row[k], theta[k]);
}

TEST_F(Features, SingleNLayout) {
  const auto f = build_features(FeatureVariant::singleN, *docs_, *models_, {5}, 5, kInfer);
  EXPECT_EQ(f.dim(), 10u);
  for (Eigen::Index r = 0; r < f.rows.rows(); ++r) expect_simplex_blocks(f.rows.row(r), {5, 5});
  EXPECT_THROW(build_features(FeatureVariant::singleN, *docs_, *models_, kNs, 5, kInfer), ValidationError);
}

TEST_F(Features, SingleNBlocksReassembleAggregate) {
  const auto doc = *section((*docs_)[7], 5);
  const auto aggregate = aggregate_features(doc, *models_, kNs, kInfer);
  const auto s3 = single_n_features(doc, models_->at(3), kInfer);
  const auto s5 = single_n_features(doc, models_->at(5), kInfer);
  std::vector<double> rebuilt;
  rebuilt.insert(rebuilt.end(), s3.begin(), s3.begin() + 3);
  rebuilt.insert(rebuilt.end(), s5.begin(), s5.begin() + 5);
  rebuilt.insert(rebuilt.end(), s3.begin() + 3, s3.end());
  rebuilt.insert(rebuilt.end(), s5.begin() + 5, s5.end());
  EXPECT_EQ(rebuilt, aggregate);
}

TEST_F(Features, EmptyRemainderIsUniform) {
  SectionedDoc doc = *section((*docs_)[0], 5);
  doc.remainder_tokens = {"never-seen-token"};
  const auto row = aggregate_features(doc, *models_, kNs, kInfer);
  for (std::size_t i = 8; i < 11; ++i) EXPECT_NEAR(row[i], 1.0 / 3.0, 1e-15);
  for (std::size_t i = 11; i < 16; ++i) EXPECT_NEAR(row[i], 0.2, 1e-15);
}

TEST_F(Features, RowsFollowCorpusOrderAndSkipShortDocs) {
  auto docs = *docs_;
  docs[4].sentences.resize(2);
  const auto f = build_features(FeatureVariant::aggregate300, docs, *models_, kNs, 5, kInfer);
  ASSERT_EQ(f.size(), 39u);
  std::vector<std::string> expected;
  for (const auto& d : docs)
    if (d.sentences.size() >= 6) expected.push_back(d.id);
  EXPECT_EQ(f.ids, expected);
}

TEST_F(Features, Deterministic) {
  const auto a = build_features(FeatureVariant::aggregate300, *docs_, *models_, kNs, 5, kInfer);
  const auto b = build_features(FeatureVariant::aggregate300, *docs_, *models_, kNs, 5, kInfer);
  EXPECT_EQ(features_csv(a), features_csv(b));
}

TEST_F(Features, CsvRoundTrip) {
  const auto f = build_features(FeatureVariant::wholedoc150, *docs_, *models_, kNs, 5, kInfer);
  const auto back = parse_features_csv(features_csv(f), FeatureVariant::wholedoc150);
  EXPECT_EQ(back.ids, f.ids);
  EXPECT_EQ(back.labels, f.labels);
  EXPECT_EQ(back.rows, f.rows);
}

TEST(FeaturesCsv, RejectsMalformedInput) {
  EXPECT_THROW(parse_features_csv("", FeatureVariant::aggregate300), ParseError);
  EXPECT_THROW(parse_features_csv("id,label,g0\n", FeatureVariant::aggregate300), ParseError);
  EXPECT_THROW(parse_features_csv("id,label,f0\na,fake,x\n", FeatureVariant::aggregate300), ParseError);
  EXPECT_THROW(parse_features_csv("id,label,f0\na,bogus,1\n", FeatureVariant::aggregate300), ParseError);
}

TEST(BalanceClasses, SubsamplesBiggerClassPreservingOrder) {
  FeatureMatrix f;
  f.rows.resize(10, 1);
  for (int i = 0; i < 10; ++i) {
    f.rows(i, 0) = i;
    f.ids.push_back("d" + std::to_string(i));
    f.labels.push_back(i < 7 ? Label::fake : Label::real);
  }
  const auto b = balance_classes(f, 3);
  ASSERT_EQ(b.size(), 6u);
  EXPECT_EQ(std::count(b.labels.begin(), b.labels.end(), Label::fake), 3);
  for (std::size_t i = 1; i < b.size(); ++i) EXPECT_LT(b.rows(i - 1, 0), b.rows(i, 0));
  EXPECT_EQ(features_csv(b), features_csv(balance_classes(f, 3)));
  EXPECT_EQ(f.binary_labels()[0], 1);
  f.labels[0] = Label::rumour;
  EXPECT_THROW(f.binary_labels(), ValidationError);
}
