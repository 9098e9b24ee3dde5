#include "topicdrift/synth.hpp"

#include <cstdio>

#include "topicdrift/error.hpp"
#include "topicdrift/rng.hpp"

namespace topicdrift {

void SynthSpec::validate() const {
  if (topics < 1) throw ValidationError("synth: topics must be >= 1");
  if (vocab_size < 2 * slice_count())
    throw ValidationError("synth: vocab_size " + std::to_string(vocab_size) + " is below 2 x " +
                          std::to_string(slice_count()) + " slices");
  if (docs_per_class < 1) throw ValidationError("synth: docs_per_class must be >= 1");
  if (sentences_per_doc < 1 || words_per_sentence < 1)
    throw ValidationError("synth: sentences_per_doc and words_per_sentence must be >= 1");
  if (opening_sentences > sentences_per_doc)
    throw ValidationError("synth: opening_sentences exceeds sentences_per_doc");
  for (double p : {drift_prob, real_drift_prob, slice_mass, class_signature_mass})
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("synth: probabilities must lie in [0, 1]");
  if (topics < 2 && (drift_prob > 0.0 || real_drift_prob > 0.0))
    throw ValidationError("synth: topic drift needs at least two topics");
}

std::string synth_word(std::size_t w, std::size_t vocab_size) {
  int width = 1;
  for (std::size_t v = vocab_size > 0 ? vocab_size - 1 : 0; v >= 10; v /= 10) ++width;
  if (width < 3) width = 3;
  char buf[32];
  std::snprintf(buf, sizeof buf, "w%0*zu", width, w);
  return buf;
}

std::pair<std::size_t, std::size_t> synth_slice(const SynthSpec& spec, std::size_t t) {
  const std::size_t width = spec.slice_width();
  return {t * width, (t + 1) * width};
}

namespace {

std::size_t draw_word(Rng& rng, const SynthSpec& spec, std::size_t topic, std::size_t signature_slice) {
  if (spec.class_signature_mass > 0.0 && rng.uniform() < spec.class_signature_mass) {
    const auto [lo, hi] = synth_slice(spec, signature_slice);
    return lo + rng.below(hi - lo);
  }
  if (rng.uniform() < spec.slice_mass) {
    const auto [lo, hi] = synth_slice(spec, topic);
    return lo + rng.below(hi - lo);
  }
  return rng.below(spec.vocab_size);
}

}  // namespace

SynthCorpus generate(const SynthSpec& spec) {
  spec.validate();
  SynthCorpus out;
  for (int cls = 0; cls < 2; ++cls) {
    const bool fake = cls == 0;
    const double drift = fake ? spec.drift_prob : spec.real_drift_prob;
    for (std::size_t d = 0; d < spec.docs_per_class; ++d) {
      Rng rng(derive_seed(spec.seed, cls, d));
      SynthDocInfo info;
      info.opening_topic = rng.below(spec.topics);
      info.remainder_topic = info.opening_topic;
      if (spec.topics > 1 && rng.uniform() < drift) {
        info.remainder_topic = rng.below(spec.topics - 1);
        if (info.remainder_topic >= info.opening_topic) ++info.remainder_topic;
      }
      const std::size_t signature = spec.topics + (fake ? 0 : 1);
      std::string text;
      for (std::size_t s = 0; s < spec.sentences_per_doc; ++s) {
        const std::size_t topic = s < spec.opening_sentences ? info.opening_topic : info.remainder_topic;
        if (s > 0) text += ' ';
        for (std::size_t w = 0; w < spec.words_per_sentence; ++w) {
          std::string word = synth_word(draw_word(rng, spec, topic, signature), spec.vocab_size);
          if (w == 0) word[0] = 'W';
          else text += ' ';
          text += word;
        }
        text += '.';
      }
      char id[32];
      std::snprintf(id, sizeof id, "%s-%04zu", fake ? "fake" : "real", d);
      out.corpus.push_back({id, fake ? Label::fake : Label::real, std::move(text)});
      out.planted.push_back(info);
    }
  }
  return out;
}

}  // namespace topicdrift
