#include "topicdrift/corpus.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

#include "json.hpp"

#include "topicdrift/error.hpp"
#include "topicdrift/io.hpp"
#include "unicode_tables.hpp"

namespace topicdrift {

// Defined in the generated stopwords translation unit.
std::string_view bundled_stopword_text() noexcept;

namespace {

using nlohmann::json;

constexpr std::array<std::pair<Label, std::string_view>, 5> kLabelNames{{
    {Label::fake, "fake"},
    {Label::real, "real"},
    {Label::rumour, "rumour"},
    {Label::nonrumour, "nonrumour"},
    {Label::unlabeled, "unlabeled"},
}};

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// --- UTF-8 ---------------------------------------------------------------

constexpr char32_t kReplacement = 0xFFFD;

char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i++]);
  if (b0 < 0x80) return b0;
  int extra;
  char32_t cp;
  if ((b0 & 0xE0) == 0xC0) {
    extra = 1;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    extra = 2;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    extra = 3;
    cp = b0 & 0x07;
  } else {
    return kReplacement;
  }
  for (int k = 0; k < extra; ++k) {
    if (i >= s.size()) return kReplacement;
    const auto b = static_cast<unsigned char>(s[i]);
    if ((b & 0xC0) != 0x80) return kReplacement;
    cp = (cp << 6) | (b & 0x3F);
    ++i;
  }
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

char32_t lookup(std::span<const detail::CodepointPair> table, char32_t cp) {
  auto it = std::lower_bound(table.begin(), table.end(), cp,
                             [](const detail::CodepointPair& p, char32_t c) { return p.from < c; });
  return (it != table.end() && it->from == cp) ? it->to : cp;
}

char32_t to_lower(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  return lookup(detail::lowercase_table(), cp);
}

bool is_combining_mark(char32_t cp) {
  return (cp >= 0x0300 && cp <= 0x036F) || (cp >= 0x1AB0 && cp <= 0x1AFF) ||
         (cp >= 0x1DC0 && cp <= 0x1DFF) || (cp >= 0x20D0 && cp <= 0x20FF) ||
         (cp >= 0xFE20 && cp <= 0xFE2F);
}

bool is_word_codepoint(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  }
  if (cp <= 0xBF) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;  // punctuation, symbols, arrows
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
  if (cp >= 0xFF00 && cp <= 0xFF20) return false;
  if (cp == kReplacement || cp >= 0x1F000) return false;  // invalid bytes, emoji
  return true;
}

bool is_upper(char32_t cp) {
  if (cp < 0x80) return cp >= 'A' && cp <= 'Z';
  return to_lower(cp) != cp;
}

std::size_t codepoint_count(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

// --- sentences -----------------------------------------------------------

const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> set{
      "mr",  "mrs",  "ms",  "dr",   "prof", "sr",  "jr",  "st",   "vs",  "etc",
      "inc", "ltd",  "co",  "corp", "gen",  "gov", "sen", "rep",  "rev", "hon",
      "lt",  "col",  "sgt", "capt", "u.s",  "u.k", "u.n", "e.g",  "i.e", "a.m",
      "p.m", "jan",  "feb", "mar",  "apr",  "jun", "jul", "aug",  "sep", "sept",
      "oct", "nov",  "dec", "fig",  "est", "dept", "univ", "mt", "ft"};
  return set;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

// Closing punctuation that may trail a terminator: ASCII quotes/brackets and
// U+2019 / U+201D.
std::size_t closing_length(std::string_view s, std::size_t i) {
  if (i >= s.size()) return 0;
  const char c = s[i];
  if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
  if (s.substr(i, 3) == "\xE2\x80\x99" || s.substr(i, 3) == "\xE2\x80\x9D") return 3;
  return 0;
}

bool opens_sentence(std::string_view s, std::size_t i) {
  const char c = s[i];
  if (c == '"' || c == '\'' || c == '(' || c == '[') return true;
  if (c >= '0' && c <= '9') return true;
  std::size_t j = i;
  const char32_t cp = decode_utf8(s, j);
  return cp == 0x201C || cp == 0x2018 || is_upper(cp);
}

bool ends_with_abbreviation(std::string_view text, std::size_t period) {
  std::size_t b = period;
  while (b > 0 && !is_space(text[b - 1])) --b;
  std::string word(text.substr(b, period - b));
  const auto first = word.find_first_not_of("\"'([");
  if (first == std::string::npos) return false;
  word = normalize_text(word.substr(first), false);
  return abbreviations().contains(word);
}

}  // namespace

std::string_view to_string(Label label) noexcept {
  for (const auto& [l, name] : kLabelNames)
    if (l == label) return name;
  return "unlabeled";
}

Label parse_label(std::string_view name) {
  for (const auto& [l, n] : kLabelNames)
    if (n == name) return l;
  throw ValidationError("unknown label '" + std::string(name) + "'");
}

// --- loading --------------------------------------------------------------

namespace {

void check_record(Corpus& corpus, std::unordered_set<std::string>& ids, RawDocument doc,
                  std::size_t line) {
  if (trim(doc.text).empty()) throw ParseError("record '" + doc.id + "' has blank text", line);
  if (doc.id.empty()) throw ParseError("record has empty id", line);
  if (!ids.insert(doc.id).second) throw ValidationError("duplicate document id '" + doc.id + "'");
  corpus.push_back(std::move(doc));
}

Label label_at(std::string_view name, std::size_t line) {
  try {
    return parse_label(name);
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), line);
  }
}

}  // namespace

Corpus parse_corpus(std::string_view contents, CorpusFormat format) {
  Corpus corpus;
  std::unordered_set<std::string> ids;
  if (format == CorpusFormat::jsonl) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= contents.size()) {
      auto end = contents.find('\n', pos);
      if (end == std::string_view::npos) end = contents.size();
      const auto line = trim(contents.substr(pos, end - pos));
      ++line_no;
      pos = end + 1;
      if (line.empty()) continue;
      json record;
      try {
        record = json::parse(line);
      } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
      }
      for (const char* key : {"id", "label", "text"}) {
        if (!record.is_object() || !record.contains(key) || !record[key].is_string())
          throw ParseError(std::string("record missing string field '") + key + "'", line_no);
      }
      RawDocument doc{record["id"].get<std::string>(),
                      label_at(record["label"].get<std::string>(), line_no),
                      record["text"].get<std::string>()};
      check_record(corpus, ids, std::move(doc), line_no);
    }
    return corpus;
  }

  const auto records = io::parse_csv(contents);
  if (records.empty()) throw ParseError("empty CSV corpus", 1);
  const auto& header = records.front().fields;
  auto column = [&](std::string_view name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError("CSV header lacks '" + std::string(name) + "'", 1);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t id_col = column("id"), label_col = column("label"), text_col = column("text");
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(rec.fields.size()),
                       rec.line);
    RawDocument doc{rec.fields[id_col], label_at(rec.fields[label_col], rec.line),
                    rec.fields[text_col]};
    check_record(corpus, ids, std::move(doc), rec.line);
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  return parse_corpus(io::read_file(path), format);
}

std::string corpus_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& doc : corpus) {
    json record{{"id", doc.id}, {"label", to_string(doc.label)}, {"text", doc.text}};
    out += record.dump();
    out += '\n';
  }
  return out;
}

// --- configuration ----------------------------------------------------------

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = parse_stopword_file(bundled_stopword_text());
  return words;
}

PreprocessConfig PreprocessConfig::with_default_stopwords() {
  PreprocessConfig config;
  config.stopword_set = default_stopwords();
  return config;
}

void PreprocessConfig::validate() const {
  if (bigram_min_count < 1) throw ValidationError("bigram_min_count must be >= 1");
  if (!(bigram_threshold > 0.0)) throw ValidationError("bigram_threshold must be > 0");
}

bool PreprocessConfig::is_stopword(const std::string& token) const {
  return stopword_set.contains(token) || extra_stopwords.contains(token);
}

std::set<std::string> parse_stopword_file(std::string_view contents) {
  std::set<std::string> words;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    auto end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    auto line = trim(contents.substr(pos, end - pos));
    pos = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = trim(line.substr(0, hash));
    if (!line.empty()) words.insert(normalize_text(line, false));
  }
  return words;
}

std::map<std::string, std::string> parse_lemma_file(std::string_view contents) {
  std::map<std::string, std::string> lemmas;
  std::size_t pos = 0, line_no = 0;
  while (pos < contents.size()) {
    auto end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    const auto line = trim(contents.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw ParseError("lemma line must be token<TAB>lemma", line_no);
    lemmas.emplace(std::string(trim(line.substr(0, tab))), std::string(trim(line.substr(tab + 1))));
  }
  return lemmas;
}

// --- text processing ---------------------------------------------------------

std::size_t TokenDoc::token_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

std::vector<std::string> TokenDoc::flatten() const {
  std::vector<std::string> out;
  out.reserve(token_count());
  for (const auto& s : sentences) out.insert(out.end(), s.begin(), s.end());
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < text.size()) {
      if (is_terminator(text[j])) {
        ++j;
      } else if (const auto len = closing_length(text, j)) {
        j += len;
      } else {
        break;
      }
    }
    std::size_t k = j;
    while (k < text.size() && is_space(text[k])) ++k;
    const bool boundary = k > j && k < text.size() && opens_sentence(text, k) &&
                          !(text[i] == '.' && j == i + 1 && ends_with_abbreviation(text, i));
    if (boundary) {
      if (auto s = trim(text.substr(start, j - start)); !s.empty()) sentences.emplace_back(s);
      start = k;
    }
    i = j;
  }
  if (auto s = trim(text.substr(start)); !s.empty()) sentences.emplace_back(s);
  return sentences;
}

std::string normalize_text(std::string_view text, bool strip_accents) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = to_lower(decode_utf8(text, i));
    if (strip_accents) {
      if (is_combining_mark(cp)) continue;
      cp = lookup(detail::base_letter_table(), cp);
    }
    append_utf8(out, cp);
  }
  return out;
}

std::vector<std::string> tokenize_normalize(std::string_view sentence,
                                            const PreprocessConfig& config) {
  const bool strip = config.normalizer == Normalizer::lowercase_strip_accents;
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (codepoint_count(current) >= config.min_token_len && !config.is_stopword(current)) {
      if (const auto it = config.lemmas.find(current); it != config.lemmas.end()) {
        tokens.push_back(it->second);
      } else {
        tokens.push_back(current);
      }
    }
    current.clear();
  };
  std::size_t i = 0;
  while (i < sentence.size()) {
    char32_t cp = to_lower(decode_utf8(sentence, i));
    if (is_combining_mark(cp)) {
      // Marks attach to the preceding letter; stripped or kept, never a boundary.
      if (!strip && !current.empty()) append_utf8(current, cp);
      continue;
    }
    if (!is_word_codepoint(cp)) {
      flush();
      continue;
    }
    if (strip) cp = lookup(detail::base_letter_table(), cp);
    append_utf8(current, cp);
  }
  flush();
  return tokens;
}

TokenDoc preprocess_document(const RawDocument& doc, const PreprocessConfig& config) {
  TokenDoc out{doc.id, doc.label, {}};
  for (const auto& sentence : split_sentences(doc.text))
    out.sentences.push_back(tokenize_normalize(sentence, config));
  return out;
}

std::vector<TokenDoc> preprocess_corpus(const Corpus& corpus, const PreprocessConfig& config) {
  config.validate();
  std::vector<TokenDoc> docs;
  docs.reserve(corpus.size());
  for (const auto& doc : corpus) docs.push_back(preprocess_document(doc, config));
  return docs;
}

// --- phrases -----------------------------------------------------------------

double phrase_score(std::size_t pair_count, std::size_t count_a, std::size_t count_b,
                    std::size_t vocab_size, std::size_t min_count) noexcept {
  return (static_cast<double>(pair_count) - static_cast<double>(min_count)) *
         static_cast<double>(vocab_size) /
         (static_cast<double>(count_a) * static_cast<double>(count_b));
}

PhraseTable detect_bigrams(const std::vector<TokenDoc>& docs, const PreprocessConfig& config) {
  config.validate();
  std::map<std::string, std::size_t> unigrams;
  std::map<TokenPair, std::size_t> pairs;
  for (const auto& doc : docs) {
    for (const auto& sentence : doc.sentences) {
      for (std::size_t i = 0; i < sentence.size(); ++i) {
        ++unigrams[sentence[i]];
        if (i + 1 < sentence.size()) ++pairs[{sentence[i], sentence[i + 1]}];
      }
    }
  }
  PhraseTable table;
  const std::size_t vocab_size = unigrams.size();
  for (const auto& [pair, count] : pairs) {
    if (count < config.bigram_min_count) continue;
    const double score = phrase_score(count, unigrams[pair.first], unigrams[pair.second],
                                      vocab_size, config.bigram_min_count);
    if (score >= config.bigram_threshold) table.emplace(pair, score);
  }
  return table;
}

std::vector<std::string> apply_phrases(const std::vector<std::string>& tokens,
                                       const PhraseTable& table) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (i + 1 < tokens.size() && table.contains({tokens[i], tokens[i + 1]})) {
      out.push_back(tokens[i] + "_" + tokens[i + 1]);
      i += 2;
    } else {
      out.push_back(tokens[i]);
      ++i;
    }
  }
  return out;
}

void apply_phrases(std::vector<TokenDoc>& docs, const PhraseTable& table) {
  if (table.empty()) return;
  for (auto& doc : docs)
    for (auto& sentence : doc.sentences) sentence = apply_phrases(sentence, table);
}

// --- vocabulary ----------------------------------------------------------------

Vocabulary Vocabulary::build(const std::vector<TokenDoc>& docs) {
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> stats;
  for (const auto& doc : docs) {
    std::unordered_set<std::string> seen;
    for (const auto& sentence : doc.sentences) {
      for (const auto& token : sentence) {
        auto& [corpus_freq, doc_freq] = stats[token];
        ++corpus_freq;
        if (seen.insert(token).second) ++doc_freq;
      }
    }
  }
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> cf, df;
  for (auto& [token, freq] : stats) {
    tokens.push_back(token);
    cf.push_back(freq.first);
    df.push_back(freq.second);
  }
  return from_columns(std::move(tokens), std::move(cf), std::move(df));
}

Vocabulary Vocabulary::from_columns(std::vector<std::string> tokens,
                                    std::vector<std::uint64_t> corpus_freq,
                                    std::vector<std::uint64_t> doc_freq) {
  if (corpus_freq.size() != tokens.size() || doc_freq.size() != tokens.size())
    throw ValidationError("vocabulary columns differ in length");
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  v.corpus_freq_ = std::move(corpus_freq);
  v.doc_freq_ = std::move(doc_freq);
  v.index_.reserve(v.tokens_.size());
  for (std::uint32_t i = 0; i < v.tokens_.size(); ++i) {
    if (!v.index_.emplace(v.tokens_[i], i).second)
      throw ValidationError("duplicate vocabulary token '" + v.tokens_[i] + "'");
  }
  return v;
}

std::optional<std::uint32_t> Vocabulary::id(const std::string& token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

BowVector to_bow(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
  std::map<std::uint32_t, std::uint32_t> counts;
  for (const auto& token : tokens)
    if (const auto id = vocab.id(token)) ++counts[*id];
  BowVector bow;
  bow.reserve(counts.size());
  for (const auto& [id, count] : counts) bow.push_back({id, count});
  return bow;
}

BowVector to_bow(const TokenDoc& doc, const Vocabulary& vocab) {
  return to_bow(doc.flatten(), vocab);
}

std::size_t total_count(const BowVector& bow) noexcept {
  std::size_t n = 0;
  for (const auto& e : bow) n += e.count;
  return n;
}

// --- token doc persistence -------------------------------------------------------

std::string token_docs_to_jsonl(const std::vector<TokenDoc>& docs) {
  std::string out;
  for (const auto& doc : docs) {
    json record{{"id", doc.id}, {"label", to_string(doc.label)}, {"sentences", doc.sentences}};
    out += record.dump();
    out += '\n';
  }
  return out;
}

std::vector<TokenDoc> parse_token_docs(std::string_view contents) {
  std::vector<TokenDoc> docs;
  std::size_t pos = 0, line_no = 0;
  while (pos < contents.size()) {
    auto end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    const auto line = trim(contents.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto record = json::parse(line);
      docs.push_back({record.at("id").get<std::string>(),
                      label_at(record.at("label").get<std::string>(), line_no),
                      record.at("sentences").get<std::vector<std::vector<std::string>>>()});
    } catch (const json::exception& e) {
      throw ParseError(std::string("invalid token document: ") + e.what(), line_no);
    }
  }
  return docs;
}

}  // namespace topicdrift
