#include "topicdrift/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "CLI11.hpp"
#include "json.hpp"
#include "topicdrift/classify.hpp"
#include "topicdrift/cluster.hpp"
#include "topicdrift/coherence.hpp"
#include "topicdrift/corpus.hpp"
#include "topicdrift/embedcmp.hpp"
#include "topicdrift/error.hpp"
#include "topicdrift/features.hpp"
#include "topicdrift/io.hpp"
#include "topicdrift/lda.hpp"
#include "topicdrift/parallel.hpp"
#include "topicdrift/reduce.hpp"
#include "topicdrift/rng.hpp"
#include "topicdrift/svg.hpp"
#include "topicdrift/synth.hpp"
#include "topicdrift/thematic.hpp"

namespace topicdrift::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kVersion = "0.1.0";

// Stage seeds left empty inherit run.seed.
constexpr const char* kSeedKeys[] = {"synth.seed",  "lda.seed",     "infer.seed",   "features.seed",
                                     "reduce.seed", "cluster.seed", "classify.seed"};

const std::map<std::string, std::string>& default_values() {
  static const std::map<std::string, std::string> values{
      {"run.seed", "42"},
      {"corpus.input", ""},
      {"corpus.format", "auto"},
      {"preprocess.min_token_len", "2"},
      {"preprocess.phrases", "true"},
      {"preprocess.bigram_min_count", "5"},
      {"preprocess.bigram_threshold", "100"},
      {"preprocess.strip_accents", "true"},
      {"preprocess.stopwords", ""},
      {"preprocess.extra_stopwords", ""},
      {"preprocess.lemmas", ""},
      {"lda.topics", "10,20,30,40,50"},
      {"lda.alpha", "0"},
      {"lda.beta", "0.01"},
      {"lda.iterations", "500"},
      {"lda.seed", ""},
      {"infer.iterations", "100"},
      {"infer.seed", ""},
      {"infer.topics", "10"},
      {"coherence.top_m", "10"},
      {"coherence.epsilon", "1"},
      {"deviate.l", "5"},
      {"deviate.measures", "chebyshev"},
      {"deviate.epsilon", "1e-12"},
      {"deviate.alternative", "two_sided"},
      {"deviate.equal_var", "true"},
      {"deviate.per_n_tests", "false"},
      {"deviate.l_sweep", "false"},
      {"deviate.l_min", "1"},
      {"deviate.l_max", "5"},
      {"features.variant", "aggregate300"},
      {"features.l", "5"},
      {"features.single_n", "10"},
      {"features.balance", "false"},
      {"features.seed", ""},
      {"reduce.input", "features_aggregate300.csv"},
      {"reduce.method", "tsne"},
      {"reduce.dim", "2"},
      {"reduce.perplexity", "30"},
      {"reduce.iterations", "1000"},
      {"reduce.nmf_iterations", "500"},
      {"reduce.seed", ""},
      {"cluster.input", "features_reduced.csv"},
      {"cluster.k", "2"},
      {"cluster.restarts", "10"},
      {"cluster.max_iterations", "500"},
      {"cluster.baseline_trials", "1000"},
      {"cluster.seed", ""},
      {"classify.input", "features_aggregate300.csv"},
      {"classify.model", "logistic"},
      {"classify.l2", "1"},
      {"classify.k", "20"},
      {"classify.max_iterations", "1000"},
      {"classify.tolerance", "1e-6"},
      {"classify.shuffle_control", "true"},
      {"classify.seed", ""},
      {"embed.embeddings", ""},
      {"embed.scores", ""},
      {"embed.alternative", "two_sided"},
      {"synth.topics", "4"},
      {"synth.vocab_size", "200"},
      {"synth.docs_per_class", "300"},
      {"synth.sentences_per_doc", "10"},
      {"synth.words_per_sentence", "8"},
      {"synth.opening_sentences", "5"},
      {"synth.drift_prob", "1"},
      {"synth.real_drift_prob", "0"},
      {"synth.slice_mass", "0.9"},
      {"synth.class_signature_mass", "0"},
      {"synth.seed", ""},
  };
  return values;
}

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    s.remove_prefix(1);
    s.remove_suffix(1);
  }
  return std::string(s);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string checksum_of(const fs::path& path) { return hex64(fnv1a(io::read_file(path))); }

}  // namespace

// --- Config ---------------------------------------------------------------------------------

Config Config::defaults() {
  Config c;
  c.values_ = default_values();
  return c;
}

void Config::set(const std::string& key, std::string value) {
  if (!values_.count(key)) throw ValidationError("unknown configuration key '" + key + "'");
  values_[key] = std::move(value);
}

void Config::set(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ValidationError("expected section.key=value, got '" + std::string(assignment) + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::merge_ini(std::string_view text) {
  boost::property_tree::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError("config: " + e.message(), e.line());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ValidationError("config key '" + section + "' must sit inside a [section]");
    for (const auto& [key, value] : body) set(section + "." + key, trim(value.data()));
  }
}

const std::string& Config::str(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw std::logic_error("configuration key '" + key + "' has no default");
  return it->second;
}

std::size_t Config::size(const std::string& key) const {
  const auto& v = str(key);
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ValidationError(key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

double Config::real(const std::string& key) const {
  const auto& v = str(key);
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(out))
    throw ValidationError(key + ": expected a number, got '" + v + "'");
  return out;
}

bool Config::flag(const std::string& key) const {
  const auto& v = str(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ValidationError(key + ": expected true or false, got '" + v + "'");
}

std::uint64_t Config::seed(const std::string& key) const {
  const auto& v = str(key);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ValidationError(key + ": expected an unsigned integer seed, got '" + v + "'");
  return out;
}

std::vector<std::string> Config::list(const std::string& key) const {
  std::vector<std::string> out;
  std::string_view v = str(key);
  while (!v.empty()) {
    const auto comma = v.find(',');
    auto item = trim(v.substr(0, comma));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<std::size_t> Config::size_list(const std::string& key) const {
  std::vector<std::size_t> out;
  for (const auto& item : list(key)) {
    Config tmp;
    tmp.values_[key] = item;
    out.push_back(tmp.size(key));
  }
  return out;
}

std::vector<double> Config::real_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : list(key)) {
    Config tmp;
    tmp.values_[key] = item;
    out.push_back(tmp.real(key));
  }
  return out;
}

void Config::resolve_seeds() {
  seed("run.seed");
  for (const char* key : kSeedKeys)
    if (values_[key].empty()) values_[key] = values_["run.seed"];
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + '=' + v + '\n';
  return out;
}

std::string Config::hash() const { return hex64(fnv1a(canonical())); }

// --- command context --------------------------------------------------------------------------

namespace {

struct Context {
  Config config;
  fs::path out_dir;
  std::string format = "json";
  bool plot = true;
  std::ostream* out = nullptr;
  std::string command;
  std::map<std::string, std::string> inputs;  // manifest path -> checksum
  std::vector<std::string> outputs;

  std::string manifest_path(const fs::path& p) const {
    const auto rel = fs::path(p).lexically_proximate(out_dir);
    const auto s = rel.generic_string();
    return s.rfind("..", 0) == 0 ? fs::absolute(p).lexically_normal().generic_string() : s;
  }

  /// Artifact paths are relative to the output directory unless absolute.
  fs::path artifact(const std::string& name) const {
    const fs::path p(name);
    return p.is_absolute() ? p : out_dir / p;
  }

  std::string read_input(const fs::path& p) {
    if (!fs::exists(p)) throw ValidationError("missing input " + p.string() + " (run the upstream command first)");
    auto text = io::read_file(p);
    inputs[manifest_path(p)] = hex64(fnv1a(text));
    return text;
  }

  void note_model_input(const fs::path& p) {
    if (!fs::exists(p)) throw ValidationError("missing model " + p.string() + " (run lda-train first)");
    inputs[manifest_path(p)] = checksum_of(p);
  }

  void write(const fs::path& p, std::string_view contents) {
    fs::create_directories(p.parent_path());
    io::write_atomic(p, contents);
    outputs.push_back(manifest_path(p));
    *out << "wrote " << manifest_path(p) << '\n';
  }

  json config_json() const {
    json j = json::object();
    for (const auto& [k, v] : config.values()) j[k] = v;
    return j;
  }

  /// JSON reports carry the configuration and its hash.
  void write_report(const fs::path& p, json body) {
    body["config_hash"] = config.hash();
    body["config"] = config_json();
    body["command"] = command;
    write(p, body.dump(2) + "\n");
  }

  void write_manifest() {
    const fs::path path = out_dir / "run.json";
    json manifest;
    if (fs::exists(path)) {
      try {
        manifest = json::parse(io::read_file(path));
      } catch (const json::exception&) {
        throw ValidationError("existing run.json is not valid JSON");
      }
    }
    manifest["tool"] = "topicdrift";
    manifest["version"] = kVersion;
    manifest["formats"] = {{"lda_model", LdaModel::kMagic}, {"logistic_model", LogisticModel::kMagic}};
    std::sort(outputs.begin(), outputs.end());
    outputs.erase(std::unique(outputs.begin(), outputs.end()), outputs.end());
    manifest["steps"][command] = {{"config_hash", config.hash()},
                                  {"config", config_json()},
                                  {"inputs", inputs},
                                  {"outputs", outputs}};
    io::write_atomic(path, manifest.dump(2) + "\n");
  }
};

CorpusFormat corpus_format(const Config& cfg, const fs::path& path) {
  const auto& f = cfg.str("corpus.format");
  if (f == "jsonl") return CorpusFormat::jsonl;
  if (f == "csv") return CorpusFormat::csv;
  if (f != "auto") throw ValidationError("corpus.format must be auto, jsonl or csv");
  return path.extension() == ".csv" ? CorpusFormat::csv : CorpusFormat::jsonl;
}

std::vector<TokenDoc> load_tokens(Context& ctx) {
  return parse_token_docs(ctx.read_input(ctx.out_dir / "tokens.jsonl"));
}

fs::path model_path(const Context& ctx, std::size_t n) {
  return ctx.out_dir / "models" / ("lda_N" + std::to_string(n) + ".tmd");
}

ModelSet load_models(Context& ctx, const std::vector<std::size_t>& ns) {
  ModelSet models;
  for (std::size_t n : ns) {
    const auto p = model_path(ctx, n);
    ctx.note_model_input(p);
    auto model = LdaModel::load(p);
    if (model.topics() != n) throw ValidationError(p.string() + " holds " + std::to_string(model.topics()) + " topics");
    models.emplace(n, std::move(model));
  }
  return models;
}

InferConfig infer_config(const Config& cfg) { return {cfg.size("infer.iterations"), cfg.seed("infer.seed")}; }

std::vector<std::size_t> topic_counts(const Config& cfg) {
  auto ns = cfg.size_list("lda.topics");
  if (ns.empty()) throw ValidationError("lda.topics is empty");
  std::sort(ns.begin(), ns.end());
  if (std::adjacent_find(ns.begin(), ns.end()) != ns.end()) throw ValidationError("lda.topics has duplicates");
  return ns;
}

FeatureMatrix load_features(Context& ctx, const std::string& key) {
  const auto path = ctx.artifact(ctx.config.str(key));
  const auto text = ctx.read_input(path);
  const auto stem = path.stem().string();
  FeatureVariant variant = FeatureVariant::aggregate300;
  const std::string prefix = "features_";
  if (stem.rfind(prefix, 0) == 0) {
    const auto name = stem.substr(prefix.size());
    variant = name == "reduced" ? FeatureVariant::reduced2d : parse_feature_variant(name);
  }
  return parse_features_csv(text, variant);
}

std::vector<std::string> label_names(const std::vector<Label>& labels) {
  std::vector<std::string> out;
  for (auto l : labels) out.emplace_back(to_string(l));
  return out;
}

json metrics_json(const EvalMetrics& m) {
  return {{"accuracy", m.accuracy}, {"f1", m.f1}, {"precision", m.precision}, {"recall", m.recall}};
}

std::string metrics_row(const std::string& name, const EvalMetrics& m) {
  return name + ',' + io::format_double(m.accuracy) + ',' + io::format_double(m.f1) + ',' +
         io::format_double(m.precision) + ',' + io::format_double(m.recall) + '\n';
}

// --- subcommands -----------------------------------------------------------------------------

void cmd_synth(Context& ctx) {
  const auto& c = ctx.config;
  SynthSpec spec;
  spec.topics = c.size("synth.topics");
  spec.vocab_size = c.size("synth.vocab_size");
  spec.docs_per_class = c.size("synth.docs_per_class");
  spec.sentences_per_doc = c.size("synth.sentences_per_doc");
  spec.words_per_sentence = c.size("synth.words_per_sentence");
  spec.opening_sentences = c.size("synth.opening_sentences");
  spec.drift_prob = c.real("synth.drift_prob");
  spec.real_drift_prob = c.real("synth.real_drift_prob");
  spec.slice_mass = c.real("synth.slice_mass");
  spec.class_signature_mass = c.real("synth.class_signature_mass");
  spec.seed = c.seed("synth.seed");
  const auto generated = generate(spec);
  ctx.write(ctx.out_dir / "corpus.jsonl", corpus_to_jsonl(generated.corpus));
  std::string planted = "id,opening_topic,remainder_topic\n";
  for (std::size_t i = 0; i < generated.corpus.size(); ++i)
    planted += generated.corpus[i].id + ',' + std::to_string(generated.planted[i].opening_topic) + ',' +
               std::to_string(generated.planted[i].remainder_topic) + '\n';
  ctx.write(ctx.out_dir / "synth_planted.csv", planted);
}

void cmd_ingest(Context& ctx) {
  const auto& input = ctx.config.str("corpus.input");
  if (input.empty()) throw ValidationError("ingest needs --input (or corpus.input)");
  const fs::path path(input);
  const auto corpus = parse_corpus(ctx.read_input(path), corpus_format(ctx.config, path));
  std::map<std::string, std::size_t> counts;
  for (const auto& d : corpus) ++counts[std::string(to_string(d.label))];
  ctx.write(ctx.out_dir / "corpus.jsonl", corpus_to_jsonl(corpus));
  ctx.write_report(ctx.out_dir / "ingest.json", {{"documents", corpus.size()}, {"labels", counts}});
}

void cmd_preprocess(Context& ctx) {
  const auto& c = ctx.config;
  PreprocessConfig pc = PreprocessConfig::with_default_stopwords();
  if (!c.str("preprocess.stopwords").empty())
    pc.stopword_set = parse_stopword_file(ctx.read_input(c.str("preprocess.stopwords")));
  for (const auto& w : c.list("preprocess.extra_stopwords")) pc.extra_stopwords.insert(w);
  if (!c.str("preprocess.lemmas").empty()) pc.lemmas = parse_lemma_file(ctx.read_input(c.str("preprocess.lemmas")));
  pc.min_token_len = c.size("preprocess.min_token_len");
  pc.bigram_min_count = c.size("preprocess.bigram_min_count");
  pc.bigram_threshold = c.real("preprocess.bigram_threshold");
  pc.normalizer = c.flag("preprocess.strip_accents") ? Normalizer::lowercase_strip_accents : Normalizer::lowercase_only;
  pc.validate();

  const auto corpus = parse_corpus(ctx.read_input(ctx.out_dir / "corpus.jsonl"), CorpusFormat::jsonl);
  auto docs = preprocess_corpus(corpus, pc);
  std::size_t phrases = 0;
  if (c.flag("preprocess.phrases")) {
    const auto table = detect_bigrams(docs, pc);
    phrases = table.size();
    apply_phrases(docs, table);
  }
  std::size_t tokens = 0;
  for (const auto& d : docs) tokens += d.token_count();
  ctx.write(ctx.out_dir / "tokens.jsonl", token_docs_to_jsonl(docs));
  ctx.write_report(ctx.out_dir / "preprocess.json",
                   {{"documents", docs.size()}, {"tokens", tokens}, {"phrases", phrases}});
}

void cmd_lda_train(Context& ctx) {
  const auto& c = ctx.config;
  const auto docs = load_tokens(ctx);
  const auto vocab = Vocabulary::build(docs);
  if (vocab.size() == 0) throw ValidationError("the token corpus is empty");
  std::vector<BowVector> bows;
  for (const auto& d : docs) bows.push_back(to_bow(d, vocab));
  const auto ns = topic_counts(c);
  std::vector<std::optional<LdaModel>> models(ns.size());
  parallel_for(ns.size(), [&](std::size_t i) {
    LdaParams params{ns[i], c.real("lda.alpha"), c.real("lda.beta"), c.size("lda.iterations"),
                     derive_seed(c.seed("lda.seed"), ns[i])};
    models[i] = train_lda(bows, vocab, params);
  });
  json summary = json::array();
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const auto& m = *models[i];
    m.save(model_path(ctx, ns[i]));
    ctx.outputs.push_back(ctx.manifest_path(model_path(ctx, ns[i])));
    *ctx.out << "wrote " << ctx.manifest_path(model_path(ctx, ns[i])) << '\n';
    std::string topics_csv = "topic,top_words\n";
    json tops = json::array();
    for (std::size_t k = 0; k < m.topics(); ++k) {
      const auto words = top_words(m, k, 10);
      std::string joined;
      for (const auto& w : words) joined += (joined.empty() ? "" : " ") + w;
      topics_csv += std::to_string(k) + ',' + io::csv_escape(joined) + '\n';
      tops.push_back(words);
    }
    ctx.write(ctx.out_dir / ("lda_topics_N" + std::to_string(ns[i]) + ".csv"), topics_csv);
    const auto& trace = m.loglik_trace();
    summary.push_back({{"topics", ns[i]},
                       {"alpha", m.alpha()},
                       {"beta", m.beta()},
                       {"iterations", m.train_iterations()},
                       {"seed", m.seed()},
                       {"loglik_first", trace.empty() ? 0.0 : trace.front()},
                       {"loglik_final", trace.empty() ? 0.0 : trace.back()},
                       {"top_words", tops}});
  }
  ctx.write_report(ctx.out_dir / "lda_train.json",
                   {{"vocabulary_size", vocab.size()}, {"documents", docs.size()}, {"models", summary}});
}

void cmd_lda_infer(Context& ctx) {
  const auto n = ctx.config.size("infer.topics");
  const auto docs = load_tokens(ctx);
  const auto models = load_models(ctx, {n});
  const auto& model = models.at(n);
  const auto cfg = infer_config(ctx.config);
  std::vector<TopicDistribution> thetas(docs.size());
  parallel_for(docs.size(), [&](std::size_t d) {
    const auto bow = to_bow(docs[d], model.vocabulary());
    thetas[d] = infer(model, bow, {cfg.iterations, inference_seed(cfg.seed, n, bow)});
  });
  std::string csv = "id,label";
  for (std::size_t k = 0; k < n; ++k) csv += ",t" + std::to_string(k);
  csv += '\n';
  for (std::size_t d = 0; d < docs.size(); ++d) {
    csv += io::csv_escape(docs[d].id) + ',' + std::string(to_string(docs[d].label));
    for (double v : thetas[d]) csv += ',' + io::format_double(v);
    csv += '\n';
  }
  ctx.write(ctx.out_dir / ("theta_N" + std::to_string(n) + ".csv"), csv);
}

void cmd_coherence(Context& ctx) {
  const auto docs = load_tokens(ctx);
  const auto models = load_models(ctx, topic_counts(ctx.config));
  json body = json::object();
  std::string csv = "topics,mean_umass,defined_topics\n";
  for (const auto& [n, model] : models) {
    const auto report = umass_model(model, docs, ctx.config.size("coherence.top_m"), ctx.config.real("coherence.epsilon"));
    ctx.write(ctx.out_dir / ("coherence_N" + std::to_string(n) + ".csv"), coherence_csv(report));
    std::size_t defined = 0;
    json scores = json::array();
    for (const auto& s : report.scores) {
      defined += s.has_value();
      scores.push_back(s ? json(*s) : json(nullptr));
    }
    body[std::to_string(n)] = {{"mean", report.mean}, {"scores", scores}};
    csv += std::to_string(n) + ',' + io::format_double(report.mean) + ',' + std::to_string(defined) + '\n';
  }
  ctx.write(ctx.out_dir / "coherence_summary.csv", csv);
  ctx.write_report(ctx.out_dir / "coherence.json", {{"top_m", ctx.config.size("coherence.top_m")}, {"models", body}});
}

std::string deviation_summary_rows(const DeviationReport& r) {
  std::string out;
  for (const auto& [cls, block] : {std::pair{"fake", &r.fake}, std::pair{"real", &r.real}}) {
    for (const auto& [n, s] : block->per_n) {
      out += std::string(to_string(r.measure.kind)) + ',' + std::to_string(r.l) + ',' + std::to_string(n) + ',' +
             cls + ',' + std::to_string(s.n) + ',' + io::format_double(s.mean) + ',' + io::format_double(s.median) +
             ',' + (s.std_dev ? io::format_double(*s.std_dev) : "") + '\n';
    }
  }
  return out;
}

void plot_deviation(Context& ctx, const DeviationReport& r, const fs::path& path) {
  std::vector<std::string> categories;
  std::vector<std::vector<std::vector<double>>> values;
  for (std::size_t n : r.n_set) {
    categories.push_back("N=" + std::to_string(n));
    std::vector<std::vector<double>> per_class(2);
    for (const auto& rec : r.records) per_class[rec.label == Label::fake ? 0 : 1].push_back(rec.per_n.at(n));
    values.push_back(std::move(per_class));
  }
  ctx.write(path, svg::box_plot(std::string(to_string(r.measure.kind)) + " deviation, l=" + std::to_string(r.l),
                                categories, {"fake", "real"}, values));
}

void cmd_deviate(Context& ctx) {
  const auto& c = ctx.config;
  const auto docs = load_tokens(ctx);
  const auto models = load_models(ctx, topic_counts(c));
  DeviationOptions options;
  options.infer = infer_config(c);
  options.alternative = parse_alternative(c.str("deviate.alternative"));
  options.equal_var = c.flag("deviate.equal_var");
  options.per_n_tests = c.flag("deviate.per_n_tests");
  const auto measures = c.list("deviate.measures");
  if (measures.empty()) throw ValidationError("deviate.measures is empty");
  std::string summary = "measure,l,N,class,n,mean,median,std\n";
  for (const auto& name : measures) {
    DivergenceMeasure measure{parse_measure(name), c.real("deviate.epsilon")};
    std::map<std::size_t, DeviationReport> reports;
    const bool sweep = c.flag("deviate.l_sweep");
    if (sweep) {
      reports = l_sweep(docs, models, measure, c.size("deviate.l_min"), c.size("deviate.l_max"), options);
    } else {
      const auto l = c.size("deviate.l");
      reports.emplace(l, evaluate_deviation(docs, models, measure, l, options));
    }
    json sweep_json = json::object();
    for (const auto& [l, report] : reports) {
      const std::string stem =
          "deviation_" + std::string(to_string(measure.kind)) + (sweep ? "_l" + std::to_string(l) : "");
      ctx.write(ctx.out_dir / (stem + "_records.csv"), deviation_records_csv(report));
      if (ctx.plot) plot_deviation(ctx, report, ctx.out_dir / (stem + ".svg"));
      summary += deviation_summary_rows(report);
      if (sweep) {
        sweep_json[std::to_string(l)] = to_json(report);
      } else {
        ctx.write_report(ctx.out_dir / (stem + ".json"), to_json(report));
      }
      *ctx.out << to_string(measure.kind) << " l=" << l << ": fake mean " << report.fake.combined.mean
               << ", real mean " << report.real.combined.mean << ", t-test p " << report.t_test.p_value << '\n';
    }
    if (sweep)
      ctx.write_report(ctx.out_dir / ("deviation_" + std::string(to_string(measure.kind)) + "_sweep.json"),
                       {{"l_sweep", sweep_json}});
  }
  ctx.write(ctx.out_dir / "deviation_summary.csv", summary);
}

void cmd_features(Context& ctx) {
  const auto& c = ctx.config;
  const auto variant = parse_feature_variant(c.str("features.variant"));
  if (variant == FeatureVariant::reduced2d) throw ValidationError("reduced features come from the reduce command");
  const auto docs = load_tokens(ctx);
  std::vector<std::size_t> ns =
      variant == FeatureVariant::singleN ? std::vector<std::size_t>{c.size("features.single_n")} : topic_counts(c);
  const auto models = load_models(ctx, ns);
  auto features = build_features(variant, docs, models, ns, c.size("features.l"), infer_config(c));
  if (c.flag("features.balance")) features = balance_classes(features, c.seed("features.seed"));
  ctx.write(ctx.out_dir / ("features_" + std::string(to_string(variant)) + ".csv"), features_csv(features));
  ctx.write_report(ctx.out_dir / ("features_" + std::string(to_string(variant)) + ".json"),
                   {{"variant", to_string(variant)}, {"rows", features.size()}, {"dim", features.dim()}, {"n_set", ns}});
}

void cmd_reduce(Context& ctx) {
  const auto& c = ctx.config;
  const auto input = load_features(ctx, "reduce.input");
  ReductionConfig rc;
  rc.method = parse_reduction_method(c.str("reduce.method"));
  rc.target_dim = c.size("reduce.dim");
  rc.nmf_iterations = c.size("reduce.nmf_iterations");
  rc.tsne.perplexity = c.real("reduce.perplexity");
  rc.tsne.iterations = c.size("reduce.iterations");
  rc.tsne.seed = c.seed("reduce.seed");
  std::string warning;
  FeatureMatrix out;
  out.variant = FeatureVariant::reduced2d;
  out.ids = input.ids;
  out.labels = input.labels;
  out.rows = reduce(input.rows, rc, &warning);
  if (!warning.empty()) *ctx.out << "warning: " << warning << '\n';
  ctx.write(ctx.out_dir / "features_reduced.csv", features_csv(out));
  if (ctx.plot && out.dim() >= 2)
    ctx.write(ctx.out_dir / "reduce_scatter.svg",
              svg::scatter(std::string(to_string(rc.method)) + " projection", out.rows, label_names(out.labels)));
  json body{{"method", to_string(rc.method)}, {"input_dim", input.dim()}, {"target_dim", out.dim()}, {"rows", out.size()}};
  if (!warning.empty()) body["warning"] = warning;
  ctx.write_report(ctx.out_dir / "reduce.json", body);
}

void cmd_cluster(Context& ctx) {
  const auto& c = ctx.config;
  const auto features = load_features(ctx, "cluster.input");
  KMeansConfig kc{c.size("cluster.k"), c.size("cluster.max_iterations"), c.size("cluster.restarts"),
                  c.seed("cluster.seed")};
  const auto result = kmeans(features.rows, kc);
  std::vector<std::size_t> classes;
  for (auto l : features.labels) classes.push_back(static_cast<std::size_t>(l));
  const double p = purity(result.assignments, classes);
  const double baseline =
      random_baseline_purity(classes, c.size("cluster.baseline_trials"), derive_seed(c.seed("cluster.seed"), 1));
  std::string csv = "id,label,cluster\n";
  for (std::size_t i = 0; i < features.size(); ++i)
    csv += io::csv_escape(features.ids[i]) + ',' + std::string(to_string(features.labels[i])) + ',' +
           std::to_string(result.assignments[i]) + '\n';
  ctx.write(ctx.out_dir / "cluster.csv", csv);
  if (ctx.plot && features.dim() == 2) {
    std::vector<std::string> names;
    for (auto a : result.assignments) names.push_back("cluster " + std::to_string(a));
    ctx.write(ctx.out_dir / "cluster_scatter.svg", svg::scatter("k-means clusters", features.rows, names));
  }
  ctx.write_report(ctx.out_dir / "cluster.json", {{"input", c.str("cluster.input")},
                                                  {"k", kc.clusters},
                                                  {"purity", p},
                                                  {"random_baseline_purity", baseline},
                                                  {"inertia", result.inertia},
                                                  {"iterations", result.iterations_used},
                                                  {"best_restart", result.best_restart}});
  *ctx.out << "purity " << p << " (random baseline " << baseline << ")\n";
}

void cmd_classify(Context& ctx) {
  const auto& c = ctx.config;
  const auto features = load_features(ctx, "classify.input");
  const auto y = features.binary_labels();
  ModelSpec spec;
  spec.kind = parse_classifier(c.str("classify.model"));
  spec.logistic.max_iterations = c.size("classify.max_iterations");
  spec.logistic.tolerance = c.real("classify.tolerance");
  spec.l2_grid = c.real_list("classify.l2");
  spec.k_grid = c.size_list("classify.k");
  const auto seed = c.seed("classify.seed");
  const auto result = evaluate_protocol(features.rows, y, spec, seed);
  std::string csv = "evaluation,accuracy,f1,precision,recall\n";
  csv += metrics_row("cv5", result.cv) + metrics_row("test", result.test);
  for (std::size_t f = 0; f < result.cv_folds.size(); ++f) csv += metrics_row("cv_fold" + std::to_string(f), result.cv_folds[f]);
  json body{{"model", to_string(spec.kind)},
            {"rows", features.size()},
            {"dim", features.dim()},
            {"cv", metrics_json(result.cv)},
            {"test", metrics_json(result.test)},
            {"n_train", result.n_train},
            {"n_test", result.n_test}};
  if (spec.kind == ClassifierKind::logistic) {
    body["selected_l2"] = result.selected_l2;
    LogisticParams params = spec.logistic;
    params.l2 = result.selected_l2;
    const auto model = logistic_train(features.rows, y, params);
    model.save(ctx.out_dir / "models" / "logistic.tmd");
    ctx.outputs.push_back(ctx.manifest_path(ctx.out_dir / "models" / "logistic.tmd"));
  } else {
    body["selected_k"] = result.selected_k;
  }
  if (c.flag("classify.shuffle_control")) {
    auto shuffled = y;
    Rng rng(derive_seed(seed, 99));
    rng.shuffle(shuffled);
    const auto control = evaluate_protocol(features.rows, shuffled, spec, seed);
    body["shuffle_control"] = {{"cv", metrics_json(control.cv)}, {"test", metrics_json(control.test)}};
    csv += metrics_row("shuffle_cv5", control.cv) + metrics_row("shuffle_test", control.test);
  }
  ctx.write(ctx.out_dir / "classify.csv", csv);
  ctx.write_report(ctx.out_dir / "classify.json", body);
  *ctx.out << to_string(spec.kind) << " cv accuracy " << result.cv.accuracy << ", test accuracy "
           << result.test.accuracy << '\n';
}

json test_json(const TestResult& t) { return to_json(t); }

void cmd_embed_compare(Context& ctx) {
  const auto& c = ctx.config;
  const auto alternative = parse_alternative(c.str("embed.alternative"));
  const auto& emb = c.str("embed.embeddings");
  const auto& scores = c.str("embed.scores");
  if (emb.empty() && scores.empty()) throw ValidationError("embed-compare needs --embeddings or --scores");
  json body = json::object();
  std::string csv = "analysis,mean_rumour,mean_nonrumour,delta_mean,median_rumour,median_nonrumour,delta_median,test,p_value\n";
  if (!emb.empty()) {
    const auto set = parse_embeddings(ctx.read_input(emb));
    const auto g = group_delta(set.rows_of(Group::rumour), set.rows_of(Group::nonrumour), alternative);
    body["embeddings"] = {{"dim", set.dim},
                          {"mean_rumour", g.mean_rumour},
                          {"mean_nonrumour", g.mean_nonrumour},
                          {"delta_mean", g.delta_mean},
                          {"median_rumour", g.median_rumour},
                          {"median_nonrumour", g.median_nonrumour},
                          {"delta_median", g.delta_median},
                          {"test", test_json(g.test)}};
    csv += "pairwise_cosine," + io::format_double(g.mean_rumour) + ',' + io::format_double(g.mean_nonrumour) + ',' +
           io::format_double(g.delta_mean) + ',' + io::format_double(g.median_rumour) + ',' +
           io::format_double(g.median_nonrumour) + ',' + io::format_double(g.delta_median) + ",mann_whitney_u," +
           io::format_double(g.test.p_value) + '\n';
  }
  if (!scores.empty()) {
    const auto s = parse_scores(ctx.read_input(scores));
    const auto r = score_group_compare(s.rumour, s.nonrumour, alternative);
    body["scores"] = {{"rumour", to_json(r.a)},
                      {"nonrumour", to_json(r.b)},
                      {"delta_mean", r.delta_mean},
                      {"delta_median", r.delta_median},
                      {"mann_whitney", test_json(r.mann_whitney)},
                      {"t_test", test_json(r.t_test)}};
    const std::string prefix = "scores," + io::format_double(r.a.mean) + ',' + io::format_double(r.b.mean) + ',' +
                               io::format_double(r.delta_mean) + ',' + io::format_double(r.a.median) + ',' +
                               io::format_double(r.b.median) + ',' + io::format_double(r.delta_median) + ',';
    csv += prefix + "mann_whitney_u," + io::format_double(r.mann_whitney.p_value) + '\n';
    csv += prefix + "t_independent," + io::format_double(r.t_test.p_value) + '\n';
  }
  ctx.write(ctx.out_dir / "embed_compare.csv", csv);
  ctx.write_report(ctx.out_dir / "embed_compare.json", body);
}

void cmd_report(Context& ctx) {
  const fs::path manifest_path = ctx.out_dir / "run.json";
  if (!fs::exists(manifest_path)) throw ValidationError("no run.json in " + ctx.out_dir.string());
  const auto manifest = json::parse(ctx.read_input(manifest_path));
  // (source, metric, value) rows pulled from the JSON reports of earlier steps.
  std::vector<std::tuple<std::string, std::string, std::string>> rows;
  auto value = [](const json& j) { return j.is_number() ? io::format_double(j.get<double>()) : j.dump(); };
  for (const auto& [step, info] : manifest.at("steps").items()) {
    if (step == "report") continue;
    for (const auto& out : info.at("outputs")) {
      const auto name = out.get<std::string>();
      if (fs::path(name).extension() != ".json") continue;
      const auto path = ctx.artifact(name);
      if (!fs::exists(path)) continue;
      const auto j = json::parse(ctx.read_input(path));
      if (j.contains("t_test")) {
        rows.emplace_back(name, "fake_mean", value(j["fake"]["combined_over_n"]["mean"]));
        rows.emplace_back(name, "real_mean", value(j["real"]["combined_over_n"]["mean"]));
        rows.emplace_back(name, "t_test_p", value(j["t_test"]["p_value"]));
      }
      for (const char* key : {"purity", "random_baseline_purity"})
        if (j.contains(key)) rows.emplace_back(name, key, value(j[key]));
      if (j.contains("cv")) rows.emplace_back(name, "cv_accuracy", value(j["cv"]["accuracy"]));
      if (j.contains("test")) rows.emplace_back(name, "test_accuracy", value(j["test"]["accuracy"]));
      if (j.contains("shuffle_control"))
        rows.emplace_back(name, "shuffle_cv_accuracy", value(j["shuffle_control"]["cv"]["accuracy"]));
    }
  }
  if (ctx.format == "csv") {
    std::string csv = "source,metric,value\n";
    for (const auto& [src, metric, v] : rows) csv += io::csv_escape(src) + ',' + metric + ',' + v + '\n';
    ctx.write(ctx.out_dir / "report.csv", csv);
  } else {
    json list = json::array();
    for (const auto& [src, metric, v] : rows) list.push_back({{"source", src}, {"metric", metric}, {"value", v}});
    ctx.write_report(ctx.out_dir / "report.json", {{"rows", list}});
  }
}

}  // namespace

// --- entry point ------------------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topic-distribution drift analysis for news corpora", "topicdrift"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = ".", format = "json";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  bool plot = true;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Base seed for every stochastic stage");
  app.add_option("--out-dir", out_dir, "Directory for artifacts and reports");
  app.add_option("--format", format, "Format of the report command output")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--plot,!--no-plot", plot, "Write SVG plots");
  app.add_option("--set", sets, "Override a configuration key: section.key=value");

  std::map<std::string, std::string> flag_overrides;
  auto bind = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(flag, [&flag_overrides, key](const std::string& v) { flag_overrides[key] = v; },
                                          help);
  };

  struct Command {
    const char* name;
    const char* help;
    void (*fn)(Context&);
  };
  const Command commands[] = {
      {"ingest", "Validate a JSONL/CSV corpus and store it as corpus.jsonl", cmd_ingest},
      {"preprocess", "Split, tokenise and phrase-merge corpus.jsonl into tokens.jsonl", cmd_preprocess},
      {"lda-train", "Train one LDA model per topic count", cmd_lda_train},
      {"lda-infer", "Infer whole-document topic distributions", cmd_lda_infer},
      {"coherence", "UMass coherence of every trained model", cmd_coherence},
      {"deviate", "Opening-vs-remainder thematic deviation and class tests", cmd_deviate},
      {"features", "Build topic-distribution feature vectors", cmd_features},
      {"reduce", "Project feature vectors to a lower dimension", cmd_reduce},
      {"cluster", "k-means clustering with purity against labels", cmd_cluster},
      {"classify", "Cross-validated logistic regression or kNN", cmd_classify},
      {"embed-compare", "Group similarity and score comparisons over external vectors", cmd_embed_compare},
      {"synth", "Generate a planted-topic corpus", cmd_synth},
      {"report", "Collect headline numbers from earlier reports", cmd_report},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& cmd : commands) subs[cmd.name] = app.add_subcommand(cmd.name, cmd.help);
  bind(subs["ingest"], "--input", "corpus.input", "Corpus file to ingest");
  bind(subs["ingest"], "--input-format", "corpus.format", "auto, jsonl or csv");
  bind(subs["lda-infer"], "--topics", "infer.topics", "Topic count of the model to use");
  bind(subs["deviate"], "--measures", "deviate.measures", "Comma-separated divergence measures");
  bind(subs["deviate"], "--l", "deviate.l", "Opening length in sentences");
  subs["deviate"]->add_flag_callback("--l-sweep", [&] { flag_overrides["deviate.l_sweep"] = "true"; },
                                     "Repeat for l = l_min..l_max");
  bind(subs["features"], "--variant", "features.variant", "aggregate300, wholedoc150 or singleN");
  bind(subs["reduce"], "--input", "reduce.input", "Feature CSV to reduce");
  bind(subs["reduce"], "--method", "reduce.method", "pca, svd, nmf or tsne");
  bind(subs["cluster"], "--input", "cluster.input", "Feature CSV to cluster");
  bind(subs["classify"], "--input", "classify.input", "Feature CSV to classify");
  bind(subs["classify"], "--model", "classify.model", "logistic or knn");
  bind(subs["embed-compare"], "--embeddings", "embed.embeddings", "Embedding file");
  bind(subs["embed-compare"], "--scores", "embed.scores", "Score file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    Context ctx;
    ctx.config = Config::defaults();
    if (!config_path.empty()) ctx.config.merge_ini(io::read_file(config_path));
    for (const auto& s : sets) ctx.config.set(std::string_view(s));
    for (const auto& [k, v] : flag_overrides) ctx.config.set(k, v);
    if (seed) ctx.config.set("run.seed", std::to_string(*seed));
    ctx.config.resolve_seeds();
    ctx.out_dir = fs::path(out_dir);
    fs::create_directories(ctx.out_dir);
    ctx.format = format;
    ctx.plot = plot;
    ctx.out = &out;
    for (const auto& cmd : commands) {
      if (!subs[cmd.name]->parsed()) continue;
      ctx.command = cmd.name;
      if (!config_path.empty()) ctx.inputs[ctx.manifest_path(config_path)] = checksum_of(config_path);
      cmd.fn(ctx);
      ctx.write_manifest();
    }
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace topicdrift::cli
