#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "topicdrift/corpus.hpp"
#include "topicdrift/rng.hpp"

namespace topicdrift {

/// Per-document topic proportions; a point on the (K-1)-simplex.
using TopicDistribution = std::vector<double>;

struct LdaParams {
  std::size_t topics = 10;
  /// Symmetric document-topic prior; non-positive means 1/K.
  double alpha = 0.0;
  double beta = 0.01;
  std::size_t iterations = 500;
  std::uint64_t seed = 0;

  double resolved_alpha() const noexcept {
    return alpha > 0.0 ? alpha : 1.0 / static_cast<double>(topics);
  }
};

struct InferConfig {
  std::size_t iterations = 100;
  std::uint64_t seed = 0;
};

/// Trained topic-word distributions. Immutable once built.
class LdaModel {
 public:
  static constexpr std::string_view kMagic = "TMDLDA1";

  /// `phi` is K x V row-major; every row must be a strictly positive simplex.
  LdaModel(Vocabulary vocab, std::size_t topics, std::vector<double> phi, double alpha,
           double beta, std::uint64_t seed, std::size_t train_iterations,
           std::vector<double> loglik_trace = {});

  std::size_t topics() const noexcept { return topics_; }
  std::size_t vocab_size() const noexcept { return vocab_.size(); }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t train_iterations() const noexcept { return train_iterations_; }
  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  const std::vector<double>& loglik_trace() const noexcept { return loglik_trace_; }

  double phi(std::size_t topic, std::uint32_t word) const { return phi_[topic * vocab_size() + word]; }
  std::span<const double> phi_row(std::size_t topic) const {
    return {phi_.data() + topic * vocab_size(), vocab_size()};
  }
  /// phi(k, w) for all k, contiguous.
  std::span<const double> phi_column(std::uint32_t word) const {
    return {phi_by_word_.data() + static_cast<std::size_t>(word) * topics_, topics_};
  }

  std::string serialize() const;
  static LdaModel deserialize(std::string bytes);
  void save(const std::filesystem::path& path) const;
  static LdaModel load(const std::filesystem::path& path);

 private:
  Vocabulary vocab_;
  std::size_t topics_;
  std::vector<double> phi_;
  std::vector<double> phi_by_word_;
  double alpha_;
  double beta_;
  std::uint64_t seed_;
  std::size_t train_iterations_;
  std::vector<double> loglik_trace_;
};

/// Collapsed Gibbs sampler over a fixed corpus. Single writer.
class GibbsSampler {
 public:
  GibbsSampler(const std::vector<BowVector>& docs, std::size_t vocab_size, const LdaParams& params);

  void sweep();
  /// log p(w, z) under the current assignments.
  double joint_log_likelihood() const;

  std::size_t topics() const noexcept { return topics_; }
  std::size_t documents() const noexcept { return doc_offsets_.size() - 1; }
  std::size_t doc_length(std::size_t d) const { return doc_offsets_[d + 1] - doc_offsets_[d]; }
  std::uint32_t doc_topic_count(std::size_t d, std::size_t k) const { return n_dk_[d * topics_ + k]; }
  std::uint32_t topic_word_count(std::size_t k, std::uint32_t w) const { return n_wk_[w * topics_ + k]; }
  std::uint64_t topic_total(std::size_t k) const { return n_k_[k]; }
  std::size_t vocab_size() const noexcept { return vocab_size_; }

  /// phi_kw = (n_kw + beta) / (n_k + V beta), K x V row-major.
  std::vector<double> phi() const;

 private:
  std::size_t topics_;
  std::size_t vocab_size_;
  double alpha_;
  double beta_;
  std::vector<std::uint32_t> words_;
  std::vector<std::uint32_t> assignments_;
  std::vector<std::size_t> doc_offsets_;
  std::vector<std::uint32_t> n_dk_;
  std::vector<std::uint32_t> n_wk_;
  std::vector<std::uint64_t> n_k_;
  std::vector<double> weights_;
  Rng rng_;
};

/// Trains a model by collapsed Gibbs sampling; phi comes from the final sweep.
LdaModel train_lda(const std::vector<BowVector>& docs, const Vocabulary& vocab,
                   const LdaParams& params);

/// Fold-in Gibbs with phi frozen; theta is averaged over the last quarter of
/// sweeps. An empty document yields the uniform distribution.
TopicDistribution infer(const LdaModel& model, const BowVector& doc, const InferConfig& config);

/// Tokens ordered by phi descending, ties by ascending token id.
std::vector<std::string> top_words(const LdaModel& model, std::size_t topic, std::size_t count);
std::vector<std::uint32_t> top_word_ids(const LdaModel& model, std::size_t topic, std::size_t count);

/// exp(-sum_d sum_w c_dw log sum_k theta_dk phi_kw / total tokens), theta by fold-in.
double perplexity(const LdaModel& model, const std::vector<BowVector>& heldout,
                  const InferConfig& config);

}  // namespace topicdrift
