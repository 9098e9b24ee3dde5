#pragma once

#include <cstdint>
#include <string>

#include "topicdrift/corpus.hpp"

namespace topicdrift {

/// Planted-topic corpus generator. Each topic owns a disjoint slice of the
/// vocabulary; a document draws one topic for its opening sentences and one for
/// the rest.
struct SynthSpec {
  std::size_t topics = 4;
  std::size_t vocab_size = 200;
  std::size_t docs_per_class = 300;
  std::size_t sentences_per_doc = 10;
  std::size_t words_per_sentence = 8;
  std::size_t opening_sentences = 5;
  /// Probability that a fake document's remainder switches topic.
  double drift_prob = 1.0;
  /// Same, for real documents.
  double real_drift_prob = 0.0;
  /// Probability a word comes from its topic's slice rather than the whole vocabulary.
  double slice_mass = 0.9;
  /// Probability a word instead comes from a slice reserved for the document's
  /// class. Zero disables the class slices.
  double class_signature_mass = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
  std::size_t slice_count() const noexcept { return topics + (class_signature_mass > 0.0 ? 2 : 0); }
  std::size_t slice_width() const noexcept { return vocab_size / slice_count(); }
};

/// Token text for vocabulary index `w`, e.g. "w007".
std::string synth_word(std::size_t w, std::size_t vocab_size);

/// Vocabulary indices of topic `t`'s slice: [t * width, (t + 1) * width).
std::pair<std::size_t, std::size_t> synth_slice(const SynthSpec& spec, std::size_t t);

struct SynthDocInfo {
  std::size_t opening_topic = 0;
  std::size_t remainder_topic = 0;
};

struct SynthCorpus {
  Corpus corpus;  // fake documents first, then real
  std::vector<SynthDocInfo> planted;
};

SynthCorpus generate(const SynthSpec& spec);

}  // namespace topicdrift
