#include "topicdrift/thematic.hpp"

#include "topicdrift/error.hpp"
#include "topicdrift/io.hpp"
#include "topicdrift/parallel.hpp"
#include "topicdrift/rng.hpp"

namespace topicdrift {

std::optional<SectionedDoc> section(const TokenDoc& doc, std::size_t l) {
  if (l < 1) throw ValidationError("opening length l must be >= 1");
  if (doc.sentences.size() < l + 1) return std::nullopt;
  SectionedDoc out{doc.id, doc.label, l, {}, {}};
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    auto& target = s < l ? out.opening_tokens : out.remainder_tokens;
    target.insert(target.end(), doc.sentences[s].begin(), doc.sentences[s].end());
  }
  return out;
}

std::uint64_t inference_seed(std::uint64_t base, std::size_t topics, const BowVector& bow) noexcept {
  std::uint64_t h = fnv1a({});
  for (const auto& e : bow) h = splitmix64(h ^ ((static_cast<std::uint64_t>(e.token_id) << 32) | e.count));
  return derive_seed(base, topics, h);
}

const Vocabulary& shared_vocabulary(const ModelSet& models) {
  if (models.empty()) throw ValidationError("no topic models supplied");
  const auto& vocab = models.begin()->second.vocabulary();
  for (const auto& [n, model] : models) {
    if (model.topics() != n)
      throw ValidationError("model keyed N=" + std::to_string(n) + " has " +
                            std::to_string(model.topics()) + " topics");
    if (!(model.vocabulary() == vocab))
      throw ValidationError("topic models were trained on different vocabularies");
  }
  return vocab;
}

DeviationReport evaluate_deviation(const std::vector<TokenDoc>& docs, const ModelSet& models,
                                   const DivergenceMeasure& measure, std::size_t l,
                                   const DeviationOptions& options) {
  const auto& vocab = shared_vocabulary(models);
  DeviationReport report;
  report.measure = measure;
  report.l = l;
  for (const auto& [n, model] : models) report.n_set.push_back(n);

  std::vector<SectionedDoc> kept;
  for (const auto& doc : docs) {
    if (doc.label != Label::fake && doc.label != Label::real) {
      ++report.ignored;
      continue;
    }
    auto& cls = doc.label == Label::fake ? report.fake : report.real;
    if (auto s = section(doc, l)) {
      ++cls.surviving;
      kept.push_back(std::move(*s));
    } else {
      ++cls.skipped;
    }
  }
  if (report.fake.surviving == 0 || report.real.surviving == 0) {
    throw ValidationError(
        "no surviving articles with at least " + std::to_string(l + 1) +
        " sentences in class '" + (report.fake.surviving == 0 ? "fake" : "real") +
        "' (fake: " + std::to_string(report.fake.surviving) + " kept, " +
        std::to_string(report.fake.skipped) + " skipped; real: " +
        std::to_string(report.real.surviving) + " kept, " + std::to_string(report.real.skipped) +
        " skipped)");
  }

  report.records.resize(kept.size());
  parallel_for(kept.size(), [&](std::size_t i) {
    const auto& doc = kept[i];
    const auto opening = to_bow(doc.opening_tokens, vocab);
    const auto remainder = to_bow(doc.remainder_tokens, vocab);
    DeviationRecord record{doc.id, doc.label, {}, 0.0};
    double sum = 0.0;
    for (const auto& [n, model] : models) {
      const auto p = infer(model, opening,
                           {options.infer.iterations,
                            inference_seed(options.infer.seed, n, opening)});
      const auto q = infer(model, remainder,
                           {options.infer.iterations,
                            inference_seed(options.infer.seed, n, remainder)});
      const double d = divergence(measure, p, q);
      record.per_n[n] = d;
      sum += d;
    }
    record.mean_over_n = sum / static_cast<double>(models.size());
    report.records[i] = std::move(record);
  });

  auto values = [&](Label label, std::optional<std::size_t> n) {
    std::vector<double> out;
    for (const auto& r : report.records)
      if (r.label == label) out.push_back(n ? r.per_n.at(*n) : r.mean_over_n);
    return out;
  };
  for (auto [label, cls] : {std::pair{Label::fake, &report.fake}, std::pair{Label::real, &report.real}}) {
    for (std::size_t n : report.n_set) cls->per_n[n] = describe(values(label, n));
    cls->combined = describe(values(label, std::nullopt));
  }
  report.t_test = t_test_ind(values(Label::fake, std::nullopt), values(Label::real, std::nullopt),
                             options.equal_var, options.alternative);
  if (options.per_n_tests) {
    for (std::size_t n : report.n_set)
      report.per_n_tests[n] =
          t_test_ind(values(Label::fake, n), values(Label::real, n), options.equal_var,
                     options.alternative);
  }
  return report;
}

std::map<std::size_t, DeviationReport> l_sweep(const std::vector<TokenDoc>& docs,
                                               const ModelSet& models,
                                               const DivergenceMeasure& measure,
                                               std::size_t l_min, std::size_t l_max,
                                               const DeviationOptions& options) {
  if (l_min < 1 || l_max < l_min) throw ValidationError("invalid opening-length range");
  std::map<std::size_t, DeviationReport> out;
  for (std::size_t l = l_min; l <= l_max; ++l)
    out.emplace(l, evaluate_deviation(docs, models, measure, l, options));
  return out;
}

// --- serialisation -------------------------------------------------------------------

nlohmann::json to_json(const Summary& s) {
  nlohmann::json j{{"n", s.n}, {"mean", s.mean}, {"median", s.median}};
  j["std"] = s.std_dev ? nlohmann::json(*s.std_dev) : nlohmann::json(nullptr);
  j["ci95_half_width"] = s.ci95_half_width ? nlohmann::json(*s.ci95_half_width) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const TestResult& r) {
  nlohmann::json j{{"method", to_string(r.method)},
                   {"statistic", r.statistic},
                   {"p_value", r.p_value},
                   {"alternative", to_string(r.alternative)},
                   {"n1", r.n1},
                   {"n2", r.n2}};
  if (r.method == TestMethod::mann_whitney_u) j["exact"] = r.exact;
  if (r.method == TestMethod::t_independent) j["df"] = r.degrees_of_freedom;
  return j;
}

nlohmann::json to_json(const DeviationReport& report) {
  auto class_block = [&](const ClassDeviation& c) {
    nlohmann::json per_n = nlohmann::json::object();
    for (const auto& [n, s] : c.per_n) per_n[std::to_string(n)] = to_json(s);
    return nlohmann::json{{"surviving", c.surviving},
                          {"skipped", c.skipped},
                          {"per_n", per_n},
                          {"combined_over_n", to_json(c.combined)}};
  };
  nlohmann::json j{{"measure", to_string(report.measure.kind)},
                   {"epsilon", report.measure.epsilon},
                   {"l", report.l},
                   {"n_set", report.n_set},
                   {"median_definition", "per-class median of per-article deviations at each N"},
                   {"t_test_unit", "per-article mean over the N set"},
                   {"ignored_other_labels", report.ignored},
                   {"fake", class_block(report.fake)},
                   {"real", class_block(report.real)},
                   {"t_test", to_json(report.t_test)}};
  if (!report.per_n_tests.empty()) {
    nlohmann::json tests = nlohmann::json::object();
    for (const auto& [n, t] : report.per_n_tests) tests[std::to_string(n)] = to_json(t);
    j["per_n_t_tests"] = tests;
  }
  return j;
}

std::string deviation_records_csv(const DeviationReport& report) {
  std::string out = "id,label";
  for (std::size_t n : report.n_set) out += ",N" + std::to_string(n);
  out += ",mean_over_n\n";
  for (const auto& r : report.records) {
    out += io::csv_escape(r.id) + ',' + std::string(to_string(r.label));
    for (std::size_t n : report.n_set) out += ',' + io::format_double(r.per_n.at(n));
    out += ',' + io::format_double(r.mean_over_n) + '\n';
  }
  return out;
}

}  // namespace topicdrift
