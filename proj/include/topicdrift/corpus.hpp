#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace topicdrift {

enum class Label { fake, real, rumour, nonrumour, unlabeled };

std::string_view to_string(Label label) noexcept;
/// Throws ValidationError for unknown names.
Label parse_label(std::string_view name);

struct RawDocument {
  std::string id;
  Label label = Label::unlabeled;
  std::string text;
};

using Corpus = std::vector<RawDocument>;

enum class CorpusFormat { jsonl, csv };

/// Loads `id,label,text` records. Duplicate ids and blank texts are rejected.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
Corpus parse_corpus(std::string_view contents, CorpusFormat format);
std::string corpus_to_jsonl(const Corpus& corpus);

enum class Normalizer { lowercase_strip_accents, lowercase_only };

struct PreprocessConfig {
  std::set<std::string> stopword_set;
  std::set<std::string> extra_stopwords;
  std::size_t min_token_len = 2;
  std::size_t bigram_min_count = 5;
  double bigram_threshold = 100.0;
  Normalizer normalizer = Normalizer::lowercase_strip_accents;
  /// Optional token -> lemma mapping applied after stopword removal.
  std::map<std::string, std::string> lemmas;

  /// Defaults with the bundled stopword list.
  static PreprocessConfig with_default_stopwords();
  void validate() const;
  bool is_stopword(const std::string& token) const;
};

/// The bundled stopword list.
const std::set<std::string>& default_stopwords();

/// One token per line, `#` starts a comment.
std::set<std::string> parse_stopword_file(std::string_view contents);
/// `token<TAB>lemma` per line.
std::map<std::string, std::string> parse_lemma_file(std::string_view contents);

struct TokenDoc {
  std::string id;
  Label label = Label::unlabeled;
  /// One entry per source sentence, possibly empty after filtering.
  std::vector<std::vector<std::string>> sentences;

  std::size_t token_count() const noexcept;
  std::vector<std::string> flatten() const;
};

/// Rule-based splitter: breaks after `.`, `!` or `?` (plus closing quotes or
/// brackets) when followed by whitespace and an uppercase letter, digit or
/// opening quote, unless the word before the period is a known abbreviation.
std::vector<std::string> split_sentences(std::string_view text);

/// Splits on non-alphanumeric boundaries, lowercases, optionally strips
/// accents, then drops stopwords and short tokens.
std::vector<std::string> tokenize_normalize(std::string_view sentence,
                                            const PreprocessConfig& config);

/// Lowercase (and with `strip_accents`, accent-stripped) form of UTF-8 text.
std::string normalize_text(std::string_view text, bool strip_accents);

TokenDoc preprocess_document(const RawDocument& doc, const PreprocessConfig& config);
std::vector<TokenDoc> preprocess_corpus(const Corpus& corpus, const PreprocessConfig& config);

using TokenPair = std::pair<std::string, std::string>;
using PhraseTable = std::map<TokenPair, double>;

/// (count(ab) - min_count) * vocab_size / (count(a) * count(b)).
double phrase_score(std::size_t pair_count, std::size_t count_a, std::size_t count_b,
                    std::size_t vocab_size, std::size_t min_count) noexcept;

/// Adjacent pairs within sentences that reach both the count gate and the
/// score threshold.
PhraseTable detect_bigrams(const std::vector<TokenDoc>& docs, const PreprocessConfig& config);

/// Rewrites qualifying adjacent pairs into `a_b`, left to right, without overlap.
std::vector<std::string> apply_phrases(const std::vector<std::string>& tokens,
                                       const PhraseTable& table);
void apply_phrases(std::vector<TokenDoc>& docs, const PhraseTable& table);

class Vocabulary {
 public:
  Vocabulary() = default;

  /// Token ids follow lexicographic token order.
  static Vocabulary build(const std::vector<TokenDoc>& docs);
  /// Restores a vocabulary from persisted columns (ids = positions).
  static Vocabulary from_columns(std::vector<std::string> tokens,
                                 std::vector<std::uint64_t> corpus_freq,
                                 std::vector<std::uint64_t> doc_freq);

  std::size_t size() const noexcept { return tokens_.size(); }
  std::optional<std::uint32_t> id(const std::string& token) const;
  const std::string& token(std::uint32_t id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::uint64_t corpus_frequency(std::uint32_t id) const { return corpus_freq_.at(id); }
  std::uint64_t document_frequency(std::uint32_t id) const { return doc_freq_.at(id); }

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::uint64_t> corpus_freq_;
  std::vector<std::uint64_t> doc_freq_;
};

struct BowEntry {
  std::uint32_t token_id;
  std::uint32_t count;

  bool operator==(const BowEntry&) const = default;
};

/// Sparse bag of words with strictly increasing ids.
using BowVector = std::vector<BowEntry>;

BowVector to_bow(const std::vector<std::string>& tokens, const Vocabulary& vocab);
BowVector to_bow(const TokenDoc& doc, const Vocabulary& vocab);
std::size_t total_count(const BowVector& bow) noexcept;

/// TokenDoc persistence: one JSON object per line with id, label, sentences.
std::string token_docs_to_jsonl(const std::vector<TokenDoc>& docs);
std::vector<TokenDoc> parse_token_docs(std::string_view contents);

}  // namespace topicdrift
