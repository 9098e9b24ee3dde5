#include "topicdrift/lda.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "topicdrift/error.hpp"
#include "topicdrift/io.hpp"

namespace topicdrift {

LdaModel::LdaModel(Vocabulary vocab, std::size_t topics, std::vector<double> phi, double alpha,
                   double beta, std::uint64_t seed, std::size_t train_iterations,
                   std::vector<double> loglik_trace)
    : vocab_(std::move(vocab)),
      topics_(topics),
      phi_(std::move(phi)),
      alpha_(alpha),
      beta_(beta),
      seed_(seed),
      train_iterations_(train_iterations),
      loglik_trace_(std::move(loglik_trace)) {
  const std::size_t v = vocab_.size();
  if (topics_ < 1) throw ValidationError("LDA model needs at least one topic");
  if (v == 0) throw ValidationError("LDA model needs a non-empty vocabulary");
  if (phi_.size() != topics_ * v) throw ValidationError("phi has wrong shape");
  for (std::size_t k = 0; k < topics_; ++k) {
    double sum = 0.0;
    for (std::size_t w = 0; w < v; ++w) {
      const double p = phi_[k * v + w];
      if (!(p > 0.0)) throw ValidationError("phi entries must be strictly positive");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("phi rows must sum to 1");
  }
  phi_by_word_.resize(phi_.size());
  for (std::size_t k = 0; k < topics_; ++k)
    for (std::size_t w = 0; w < v; ++w) phi_by_word_[w * topics_ + k] = phi_[k * v + w];
}

std::string LdaModel::serialize() const {
  io::BinaryWriter out;
  out.bytes(kMagic);
  out.u32(static_cast<std::uint32_t>(topics_));
  out.u32(static_cast<std::uint32_t>(vocab_size()));
  out.f64(alpha_);
  out.f64(beta_);
  out.u64(seed_);
  out.u32(static_cast<std::uint32_t>(train_iterations_));
  for (std::uint32_t w = 0; w < vocab_size(); ++w) {
    out.str(vocab_.token(w));
    out.u64(vocab_.corpus_frequency(w));
    out.u64(vocab_.document_frequency(w));
  }
  for (double p : phi_) out.f64(p);
  out.seal();
  return out.buffer();
}

LdaModel LdaModel::deserialize(std::string bytes) {
  constexpr std::string_view family = "TMDLDA";
  if (bytes.compare(0, family.size(), family) != 0)
    throw ParseError("not an LDA model file (bad magic)", 0);
  if (bytes.compare(0, kMagic.size(), kMagic) != 0) {
    const std::string found = bytes.substr(0, kMagic.size());
    throw FormatVersionError("LDA model format '" + found + "' is not supported by this build (expects '" +
                             std::string(kMagic) + "'); retrain the model with lda-train to migrate it");
  }
  io::BinaryReader in(std::move(bytes), "LDA model");
  in.bytes(kMagic.size());
  const std::size_t k = in.u32();
  const std::size_t v = in.u32();
  const double alpha = in.f64();
  const double beta = in.f64();
  const std::uint64_t seed = in.u64();
  const std::size_t iters = in.u32();
  std::vector<std::string> tokens(v);
  std::vector<std::uint64_t> cf(v), df(v);
  for (std::size_t w = 0; w < v; ++w) {
    tokens[w] = in.str();
    cf[w] = in.u64();
    df[w] = in.u64();
  }
  std::vector<double> phi(k * v);
  for (double& p : phi) p = in.f64();
  if (!in.at_end()) throw ParseError("LDA model: trailing bytes", 0);
  return LdaModel(Vocabulary::from_columns(std::move(tokens), std::move(cf), std::move(df)), k,
                  std::move(phi), alpha, beta, seed, iters);
}

void LdaModel::save(const std::filesystem::path& path) const { io::write_atomic(path, serialize()); }

LdaModel LdaModel::load(const std::filesystem::path& path) { return deserialize(io::read_file(path)); }

// --- Gibbs sampling ------------------------------------------------------------

GibbsSampler::GibbsSampler(const std::vector<BowVector>& docs, std::size_t vocab_size,
                           const LdaParams& params)
    : topics_(params.topics),
      vocab_size_(vocab_size),
      alpha_(params.resolved_alpha()),
      beta_(params.beta),
      rng_(params.seed) {
  if (topics_ < 1) throw ValidationError("K must be >= 1");
  if (!(beta_ > 0.0) || !(alpha_ > 0.0)) throw ValidationError("alpha and beta must be > 0");
  if (docs.empty()) throw ValidationError("cannot train on an empty corpus");
  doc_offsets_.push_back(0);
  for (const auto& bow : docs) {
    for (const auto& [id, count] : bow) {
      if (id >= vocab_size_) throw ValidationError("token id outside the vocabulary");
      words_.insert(words_.end(), count, id);
    }
    doc_offsets_.push_back(words_.size());
  }
  if (words_.empty()) throw ValidationError("corpus contains no tokens");

  n_dk_.assign(documents() * topics_, 0);
  n_wk_.assign(vocab_size_ * topics_, 0);
  n_k_.assign(topics_, 0);
  weights_.resize(topics_);
  assignments_.resize(words_.size());
  for (std::size_t d = 0; d < documents(); ++d) {
    for (std::size_t i = doc_offsets_[d]; i < doc_offsets_[d + 1]; ++i) {
      const auto k = static_cast<std::uint32_t>(rng_.below(topics_));
      assignments_[i] = k;
      ++n_dk_[d * topics_ + k];
      ++n_wk_[words_[i] * topics_ + k];
      ++n_k_[k];
    }
  }
}

void GibbsSampler::sweep() {
  const double vbeta = static_cast<double>(vocab_size_) * beta_;
  for (std::size_t d = 0; d < documents(); ++d) {
    std::uint32_t* doc_counts = &n_dk_[d * topics_];
    for (std::size_t i = doc_offsets_[d]; i < doc_offsets_[d + 1]; ++i) {
      const std::uint32_t w = words_[i];
      std::uint32_t* word_counts = &n_wk_[w * topics_];
      std::uint32_t k = assignments_[i];
      --doc_counts[k];
      --word_counts[k];
      --n_k_[k];
      double total = 0.0;
      for (std::size_t t = 0; t < topics_; ++t) {
        const double p = (doc_counts[t] + alpha_) * (word_counts[t] + beta_) /
                         (static_cast<double>(n_k_[t]) + vbeta);
        weights_[t] = p;
        total += p;
      }
      k = static_cast<std::uint32_t>(rng_.categorical(weights_, total));
      assignments_[i] = k;
      ++doc_counts[k];
      ++word_counts[k];
      ++n_k_[k];
    }
  }
}

double GibbsSampler::joint_log_likelihood() const {
  const double v = static_cast<double>(vocab_size_);
  const double kk = static_cast<double>(topics_);
  double ll = kk * (std::lgamma(v * beta_) - v * std::lgamma(beta_));
  for (std::size_t k = 0; k < topics_; ++k) {
    for (std::size_t w = 0; w < vocab_size_; ++w) {
      const auto c = n_wk_[w * topics_ + k];
      if (c) ll += std::lgamma(c + beta_) - std::lgamma(beta_);
    }
    ll += v * std::lgamma(beta_) - std::lgamma(static_cast<double>(n_k_[k]) + v * beta_);
  }
  const double d_count = static_cast<double>(documents());
  ll += d_count * (std::lgamma(kk * alpha_) - kk * std::lgamma(alpha_));
  for (std::size_t d = 0; d < documents(); ++d) {
    for (std::size_t k = 0; k < topics_; ++k) ll += std::lgamma(n_dk_[d * topics_ + k] + alpha_);
    ll -= std::lgamma(static_cast<double>(doc_length(d)) + kk * alpha_);
  }
  return ll;
}

std::vector<double> GibbsSampler::phi() const {
  const double vbeta = static_cast<double>(vocab_size_) * beta_;
  std::vector<double> out(topics_ * vocab_size_);
  for (std::size_t k = 0; k < topics_; ++k) {
    const double denom = static_cast<double>(n_k_[k]) + vbeta;
    for (std::size_t w = 0; w < vocab_size_; ++w)
      out[k * vocab_size_ + w] = (n_wk_[w * topics_ + k] + beta_) / denom;
  }
  return out;
}

LdaModel train_lda(const std::vector<BowVector>& docs, const Vocabulary& vocab,
                   const LdaParams& params) {
  GibbsSampler sampler(docs, vocab.size(), params);
  std::vector<double> trace;
  trace.reserve(params.iterations);
  for (std::size_t it = 0; it < params.iterations; ++it) {
    sampler.sweep();
    trace.push_back(sampler.joint_log_likelihood());
  }
  return LdaModel(vocab, params.topics, sampler.phi(), params.resolved_alpha(), params.beta,
                  params.seed, params.iterations, std::move(trace));
}

// --- inference -----------------------------------------------------------------

TopicDistribution infer(const LdaModel& model, const BowVector& doc, const InferConfig& config) {
  const std::size_t topics = model.topics();
  const double alpha = model.alpha();
  if (config.iterations < 1) throw ValidationError("inference needs at least one sweep");
  std::vector<std::uint32_t> words;
  for (const auto& [id, count] : doc) {
    if (id >= model.vocab_size())
      throw ValidationError("document token id " + std::to_string(id) +
                            " is outside the model vocabulary");
    words.insert(words.end(), count, id);
  }
  TopicDistribution theta(topics, 1.0 / static_cast<double>(topics));
  if (words.empty()) return theta;

  Rng rng(config.seed);
  std::vector<std::uint32_t> z(words.size());
  std::vector<std::uint32_t> counts(topics, 0);
  for (auto& k : z) {
    k = static_cast<std::uint32_t>(rng.below(topics));
    ++counts[k];
  }
  std::vector<double> weights(topics);
  std::fill(theta.begin(), theta.end(), 0.0);
  const std::size_t averaged = std::max<std::size_t>(1, config.iterations / 4);
  const std::size_t first_averaged = config.iterations - averaged;
  const double norm = static_cast<double>(words.size()) + static_cast<double>(topics) * alpha;
  for (std::size_t it = 0; it < config.iterations; ++it) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      const auto column = model.phi_column(words[i]);
      --counts[z[i]];
      double total = 0.0;
      for (std::size_t k = 0; k < topics; ++k) {
        weights[k] = (counts[k] + alpha) * column[k];
        total += weights[k];
      }
      z[i] = static_cast<std::uint32_t>(rng.categorical(weights, total));
      ++counts[z[i]];
    }
    if (it >= first_averaged)
      for (std::size_t k = 0; k < topics; ++k) theta[k] += (counts[k] + alpha) / norm;
  }
  double sum = 0.0;
  for (double& p : theta) {
    p /= static_cast<double>(averaged);
    sum += p;
  }
  for (double& p : theta) p /= sum;
  return theta;
}

std::vector<std::uint32_t> top_word_ids(const LdaModel& model, std::size_t topic, std::size_t count) {
  if (topic >= model.topics()) throw ValidationError("topic index out of range");
  if (count < 1) throw ValidationError("top-word count must be >= 1");
  std::vector<std::uint32_t> ids(model.vocab_size());
  std::iota(ids.begin(), ids.end(), 0u);
  const auto row = model.phi_row(topic);
  const std::size_t m = std::min(count, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(m), ids.end(),
                    [&](std::uint32_t a, std::uint32_t b) {
                      return row[a] != row[b] ? row[a] > row[b] : a < b;
                    });
  ids.resize(m);
  return ids;
}

std::vector<std::string> top_words(const LdaModel& model, std::size_t topic, std::size_t count) {
  std::vector<std::string> words;
  for (auto id : top_word_ids(model, topic, count)) words.push_back(model.vocabulary().token(id));
  return words;
}

double perplexity(const LdaModel& model, const std::vector<BowVector>& heldout,
                  const InferConfig& config) {
  if (heldout.empty()) throw ValidationError("perplexity needs held-out documents");
  double log_lik = 0.0;
  std::size_t tokens = 0;
  for (std::size_t d = 0; d < heldout.size(); ++d) {
    const auto theta = infer(model, heldout[d], {config.iterations, derive_seed(config.seed, d)});
    for (const auto& [id, count] : heldout[d]) {
      const auto column = model.phi_column(id);
      double p = 0.0;
      for (std::size_t k = 0; k < model.topics(); ++k) p += theta[k] * column[k];
      log_lik += count * std::log(p);
      tokens += count;
    }
  }
  if (tokens == 0) throw ValidationError("held-out documents contain no in-vocabulary tokens");
  return std::exp(-log_lik / static_cast<double>(tokens));
}

}  // namespace topicdrift
