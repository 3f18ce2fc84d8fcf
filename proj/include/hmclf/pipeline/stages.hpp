#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "hmclf/eval/sampling.hpp"
#include "hmclf/eval/sweep.hpp"
#include "hmclf/labels/selectivity.hpp"
#include "hmclf/models/checkpoint.hpp"
#include "hmclf/models/trainer.hpp"
#include "hmclf/pipeline/config.hpp"
#include "hmclf/pipeline/corpus_io.hpp"
#include "hmclf/util/sha256.hpp"

namespace hmclf::pipeline {

namespace fs = std::filesystem;

/// File names inside the assemble, vocabulary and model directories.
namespace files {
inline constexpr const char* kCorpus = "corpus.jsonl";
inline constexpr const char* kContentSet = "content.tsv";
inline constexpr const char* kSenderSet = "sender.tsv";
inline constexpr const char* kActionSet = "action.tsv";
inline constexpr const char* kSalutationSet = "salutation.tsv";
inline constexpr const char* kWordsVocab = "words.vocab";
inline constexpr const char* kTrigramsVocab = "trigrams.vocab";
inline constexpr const char* kNamesVocab = "names.vocab";
inline constexpr const char* kSalutationVocab = "salutation.vocab";
inline std::string checkpoint(models::ModelKind k) { return std::string(models::to_string(k)) + ".ckpt"; }
}  // namespace files

inline std::string format_g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// ---------------------------------------------------------------- corpus

inline std::size_t gen_corpus(const PipelineConfig& cfg, const fs::path& out) {
  SynthSpec spec = cfg.synth;
  spec.seed = derive_seed(cfg.seed, "synth");
  const auto corpus = generate_corpus(spec);
  write_corpus(out, corpus);
  return corpus.size();
}

/// Action or salutation weak labels for a whole corpus.
inline std::size_t gen_labels(const fs::path& corpus_path, const std::string& kind, const fs::path& out,
                              std::size_t window_days) {
  const auto corpus = read_corpus(corpus_path).records;
  std::vector<MessageLabel> labels;
  if (kind == "action") labels = labels::build_action_labels(recent_window(corpus, window_days));
  else if (kind == "salutation") labels = labels::build_salutation_labels(corpus);
  else throw UsageError("label kind must be 'action' or 'salutation', got '" + kind + "'");
  write_labels(out, labels);
  return labels.size();
}

inline std::vector<std::string> read_id_list(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open id list " + path.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ids.push_back(line);
  return ids;
}

/// Dedups the corpus and writes it with the four labeled sets to `out_dir`.
inline TrainingSets assemble(const PipelineConfig& cfg, const fs::path& corpus_path, const fs::path& out_dir,
                             std::vector<std::string> hard_ids = {}) {
  const auto corpus = dedup_and_cap(read_corpus(corpus_path).records, cfg.per_day_cap);
  const auto sets = assemble_training_sets(corpus, cfg.assemble_options(std::move(hard_ids)));
  fs::create_directories(out_dir);
  write_corpus(out_dir / files::kCorpus, corpus);
  write_labels(out_dir / files::kContentSet, sets.content);
  write_labels(out_dir / files::kSenderSet, sets.sender);
  write_labels(out_dir / files::kActionSet, sets.action);
  write_labels(out_dir / files::kSalutationSet, sets.salutation);
  return sets;
}

inline TrainingSets load_sets(const fs::path& dir) {
  return {read_labels(dir / files::kContentSet), read_labels(dir / files::kSenderSet),
          read_labels(dir / files::kActionSet), read_labels(dir / files::kSalutationSet)};
}

// ---------------------------------------------------------------- vocabularies

struct Workspace {
  std::vector<EmailRecord> corpus;
  std::unordered_map<std::string, std::size_t> index;  ///< message id -> corpus position
  TrainingSets sets;

  static Workspace load(const fs::path& sets_dir) {
    Workspace w;
    w.corpus = read_corpus(sets_dir / files::kCorpus).records;
    for (std::size_t i = 0; i < w.corpus.size(); ++i) w.index.emplace(w.corpus[i].message_id, i);
    w.sets = load_sets(sets_dir);
    for (const auto* set : {&w.sets.content, &w.sets.sender, &w.sets.action, &w.sets.salutation}) {
      for (const auto& l : *set) {
        if (!w.index.contains(l.message_id)) throw DataError("labeled id " + l.message_id + " is not in the corpus");
      }
    }
    return w;
  }

  const EmailRecord& record(const std::string& id) const { return corpus[index.at(id)]; }
};

/// Labels in the given split, each id once.
inline std::vector<MessageLabel> split_unique(std::span<const MessageLabel> set, Split split,
                                              const PipelineConfig& cfg) {
  std::vector<MessageLabel> out;
  const std::uint64_t seed = derive_seed(cfg.seed, "split");
  for (const auto& l : set) {
    if (!out.empty() && out.back().message_id == l.message_id) continue;
    if (split_of(l.message_id, seed, cfg.val_fraction, cfg.test_fraction) == split) out.push_back(l);
  }
  return out;
}

inline models::VocabSet build_vocabs(const PipelineConfig& cfg, const Workspace& w) {
  using text::LabeledDocument;
  const auto content = split_unique(w.sets.content, Split::kTrain, cfg);
  const auto sender = split_unique(w.sets.sender, Split::kTrain, cfg);
  const auto salutation = split_unique(w.sets.salutation, Split::kTrain, cfg);
  std::vector<LabeledDocument> words, trigrams, names, segments;
  for (const auto& l : content) {
    const auto& r = w.record(l.message_id);
    auto tokens = text::tokenize_words(r.subject);
    auto body = text::tokenize_words(r.body);
    tokens.insert(tokens.end(), body.begin(), body.end());
    words.push_back({std::move(tokens), l.label});
  }
  for (const auto& l : sender) {
    const auto& r = w.record(l.message_id);
    trigrams.push_back({text::letter_trigrams(r.sender_address, cfg.sequence.address), l.label});
    names.push_back({text::tokenize_words(r.sender_name), l.label});
  }
  for (const auto& l : salutation) segments.push_back({labels::salutation_segment(w.record(l.message_id).body), l.label});
  const auto& v = cfg.vocab;
  return {text::build_vocabulary(words, text::VocabKind::kWord, v.words_freq, v.words_chi, "words"),
          text::build_vocabulary(trigrams, text::VocabKind::kTrigram, v.trigrams_freq, v.trigrams_chi, "trigrams"),
          text::build_vocabulary(names, text::VocabKind::kWord, v.names_freq, v.names_chi, "names"),
          text::build_vocabulary(segments, text::VocabKind::kWord, v.salutation_freq, v.salutation_chi, "salutation")};
}

inline void save_vocabs(const models::VocabSet& v, const fs::path& dir) {
  fs::create_directories(dir);
  v.words.save((dir / files::kWordsVocab).string());
  v.trigrams.save((dir / files::kTrigramsVocab).string());
  v.names.save((dir / files::kNamesVocab).string());
  v.salutation.save((dir / files::kSalutationVocab).string());
}

inline models::VocabSet load_vocabs(const fs::path& dir) {
  using text::Vocabulary;
  return {Vocabulary::load((dir / files::kWordsVocab).string()), Vocabulary::load((dir / files::kTrigramsVocab).string()),
          Vocabulary::load((dir / files::kNamesVocab).string()),
          Vocabulary::load((dir / files::kSalutationVocab).string())};
}

// ---------------------------------------------------------------- training

struct ModelSummary {
  models::ModelKind kind;
  std::size_t train_examples = 0;
  std::size_t val_examples = 0;
  models::TrainReport report;
  double seconds = 0.0;
};

struct TrainSummary {
  std::vector<ModelSummary> models;
  double seconds = 0.0;
};

namespace detail {

inline models::TextCnnConfig text_config(const PipelineConfig& cfg, const models::VocabSet& v, models::ModelKind kind) {
  models::TextCnnConfig c;
  c.kind = kind;
  c.vocab_size = v.words.size();
  c.vocab_hash = v.words.hash();
  c.dropout = kind == models::ModelKind::kContent ? cfg.train.content_dropout : cfg.train.action_dropout;
  c.subject_length = cfg.sequence.subject;
  c.content_length = cfg.sequence.content_train;
  return c;
}

inline models::SenderCnnConfig sender_config(const PipelineConfig& cfg, const models::VocabSet& v) {
  models::SenderCnnConfig c;
  c.trigram_vocab_size = v.trigrams.size();
  c.trigram_vocab_hash = v.trigrams.hash();
  c.name_vocab_size = v.names.size();
  c.name_vocab_hash = v.names.hash();
  c.dropout = cfg.train.sender_dropout;
  c.address_length = cfg.sequence.address;
  c.name_length = cfg.sequence.name;
  return c;
}

inline models::SalutationCnnConfig salutation_config(const PipelineConfig& cfg, const models::VocabSet& v) {
  models::SalutationCnnConfig c;
  c.vocab_size = v.salutation.size();
  c.vocab_hash = v.salutation.hash();
  c.dropout = cfg.train.salutation_dropout;
  c.length = cfg.sequence.salutation;
  return c;
}

inline nlohmann::json epochs_json(const models::TrainReport& r) {
  auto arr = nlohmann::json::array();
  for (const auto& e : r.epochs) {
    arr.push_back({{"epoch", e.epoch},
                   {"train_loss", e.train_loss},
                   {"val_loss", e.val_loss ? nlohmann::json(*e.val_loss) : nlohmann::json(nullptr)}});
  }
  return arr;
}

}  // namespace detail

/// Trains one model on the train/val split of `set`. On divergence the last
/// finite state is written to `path` before the error propagates.
inline ModelSummary train_one(models::Classifier& model, std::span<const MessageLabel> set,
                              const std::unordered_map<std::string, const models::EncodedMessage*>& encoded,
                              const PipelineConfig& cfg, std::size_t epochs, const fs::path& path,
                              std::ostream* log) {
  Stopwatch clock;
  models::LabeledSet train_set, val_set;
  const std::uint64_t split_seed = derive_seed(cfg.seed, "split");
  for (const auto& l : set) {
    const auto s = split_of(l.message_id, split_seed, cfg.val_fraction, cfg.test_fraction);
    if (s == Split::kTrain) train_set.add(*encoded.at(l.message_id), l.label);
    else if (s == Split::kVal) val_set.add(*encoded.at(l.message_id), l.label);
  }
  const std::string name = models::to_string(model.kind());
  if (train_set.size() < 2) throw DataError(name + " training split has fewer than two examples");

  models::TrainOptions opt;
  opt.epochs = epochs;
  opt.batch_size = cfg.train.batch_size;
  opt.adam.learning_rate = cfg.train.learning_rate;
  opt.seed = derive_seed(cfg.seed, "train/" + name);
  opt.max_steps = cfg.train.max_steps;
  opt.on_epoch = [&](const models::EpochLog& e) {
    if (!log) return;
    *log << name << " epoch " << e.epoch << " train_loss " << format_g9(e.train_loss);
    if (e.val_loss) *log << " val_loss " << format_g9(*e.val_loss);
    *log << " (" << format_g9(clock.seconds()) << " s)\n" << std::flush;
  };

  ModelSummary summary{model.kind(), train_set.size(), val_set.size(), {}, 0.0};
  nlohmann::json meta = {{"training", cfg.training_json()},
                         {"train_examples", train_set.size()},
                         {"val_examples", val_set.size()}};
  try {
    summary.report = models::train(model, train_set, val_set.size() > 0 ? &val_set : nullptr, opt);
  } catch (const DivergenceError&) {
    meta["status"] = "diverged";
    models::save_checkpoint(model, path, meta);
    if (log) *log << name << " diverged; last finite state saved to " << path.string() << "\n";
    throw;
  }
  meta["status"] = "ok";
  meta["epochs"] = detail::epochs_json(summary.report);
  meta["steps"] = summary.report.steps;
  meta["best_epoch"] = summary.report.best_epoch ? nlohmann::json(*summary.report.best_epoch) : nlohmann::json(nullptr);
  models::save_checkpoint(model, path, meta);
  summary.seconds = clock.seconds();
  return summary;
}

/// Trains the content, sender, action and salutation models, then the full
/// model on top of the frozen sub-models loaded back from their checkpoints.
inline TrainSummary train_all(const PipelineConfig& cfg, const fs::path& sets_dir, const fs::path& vocab_dir,
                              const fs::path& out_dir, std::ostream* log = nullptr) {
  using models::ModelKind;
  Stopwatch clock;
  const auto w = Workspace::load(sets_dir);
  const auto vocabs = load_vocabs(vocab_dir);
  const models::MessageEncoder encoder(vocabs, cfg.sequence);
  fs::create_directories(out_dir);

  // Encode every labeled message once; signals are attached later for the full model.
  std::vector<std::string> ids;
  for (const auto* set : {&w.sets.content, &w.sets.sender, &w.sets.action, &w.sets.salutation})
    for (const auto& l : *set) ids.push_back(l.message_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<models::EncodedMessage> encoded;
  encoded.reserve(ids.size());
  for (const auto& id : ids) encoded.push_back(encoder.encode(w.record(id), models::Phase::kTrain));
  std::unordered_map<std::string, const models::EncodedMessage*> by_id;
  for (std::size_t i = 0; i < ids.size(); ++i) by_id.emplace(ids[i], &encoded[i]);

  TrainSummary summary;
  const auto path = [&](ModelKind k) { return out_dir / files::checkpoint(k); };
  const auto seed = [&](ModelKind k) { return derive_seed(cfg.seed, std::string("init/") + models::to_string(k)); };
  {
    models::TextCnn m(detail::text_config(cfg, vocabs, ModelKind::kContent), seed(ModelKind::kContent));
    summary.models.push_back(train_one(m, w.sets.content, by_id, cfg, cfg.train.sub_epochs, path(ModelKind::kContent), log));
  }
  {
    models::SenderCnn m(detail::sender_config(cfg, vocabs), seed(ModelKind::kSender));
    summary.models.push_back(train_one(m, w.sets.sender, by_id, cfg, cfg.train.sub_epochs, path(ModelKind::kSender), log));
  }
  {
    models::TextCnn m(detail::text_config(cfg, vocabs, ModelKind::kAction), seed(ModelKind::kAction));
    summary.models.push_back(train_one(m, w.sets.action, by_id, cfg, cfg.train.sub_epochs, path(ModelKind::kAction), log));
  }
  {
    models::SalutationCnn m(detail::salutation_config(cfg, vocabs), seed(ModelKind::kSalutation));
    summary.models.push_back(
        train_one(m, w.sets.salutation, by_id, cfg, cfg.train.sub_epochs, path(ModelKind::kSalutation), log));
  }

  // The full model is assembled from the saved files so it uses exactly the
  // sub-model state a reader of those checkpoints would see.
  nlohmann::json manifest;
  for (auto k : {ModelKind::kContent, ModelKind::kSender, ModelKind::kAction, ModelKind::kSalutation}) {
    manifest[models::to_string(k)] = {{"file", files::checkpoint(k)}, {"sha256", sha256_file(path(k).string())}};
  }
  models::FullModel full(models::load_model<models::TextCnn>(path(ModelKind::kContent)),
                         models::load_model<models::SenderCnn>(path(ModelKind::kSender)),
                         models::load_model<models::TextCnn>(path(ModelKind::kAction)),
                         models::load_model<models::SalutationCnn>(path(ModelKind::kSalutation)), cfg.train.q,
                         seed(ModelKind::kFull));
  full.set_manifest(manifest);
  full.check_vocabularies(vocabs);
  full.attach_signals(encoded);
  summary.models.push_back(train_one(full, w.sets.content, by_id, cfg, cfg.train.full_epochs, path(ModelKind::kFull), log));
  summary.seconds = clock.seconds();
  return summary;
}

// ---------------------------------------------------------------- inference

struct ThroughputReport {
  std::size_t messages = 0;
  std::size_t threads = 1;
  double seconds = 0.0;
  double messages_per_second = 0.0;
};

/// P(human) for every record in input order. Work is cut into fixed chunks
/// and each chunk is scored independently, so results do not depend on the
/// number of threads.
inline std::vector<double> score_records(const models::Classifier& model, const models::VocabSet& vocabs,
                                         const text::SequenceSpec& spec, std::span<const EmailRecord> records,
                                         std::size_t threads, std::size_t chunk = 256) {
  model.check_vocabularies(vocabs);
  if (threads == 0) throw UsageError("threads must be positive");
  std::vector<double> scores(records.size());
  const std::size_t n_chunks = (records.size() + chunk - 1) / chunk;
  const models::MessageEncoder encoder(vocabs, spec);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    try {
      for (std::size_t c = next++; c < n_chunks; c = next++) {
        const std::size_t begin = c * chunk, end = std::min(records.size(), begin + chunk);
        const auto encoded = encoder.encode_all(records.subspan(begin, end - begin), models::Phase::kInfer);
        std::vector<const models::EncodedMessage*> batch;
        for (const auto& m : encoded) batch.push_back(&m);
        const auto p = model.predict(batch);
        std::copy(p.begin(), p.end(), scores.begin() + static_cast<std::ptrdiff_t>(begin));
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = n_chunks;
    }
  };
  const std::size_t n_workers = std::min(threads, std::max<std::size_t>(1, n_chunks));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return scores;
}

inline void write_scores(const fs::path& path, std::span<const EmailRecord> records, std::span<const double> scores) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write scores " + path.string());
  for (std::size_t i = 0; i < records.size(); ++i) out << records[i].message_id << '\t' << format_g9(scores[i]) << '\n';
  if (!out) throw DataError("failed writing scores " + path.string());
}

inline ThroughputReport predict_batch(const fs::path& checkpoint, const fs::path& vocab_dir, const fs::path& corpus_path,
                                      const fs::path& out, std::size_t threads, const text::SequenceSpec& spec = {}) {
  const auto loaded = models::load_checkpoint(checkpoint);
  const auto vocabs = load_vocabs(vocab_dir);
  loaded.model->check_vocabularies(vocabs);
  const auto corpus = read_corpus(corpus_path).records;
  Stopwatch clock;
  const auto scores = score_records(*loaded.model, vocabs, spec, corpus, threads);
  ThroughputReport report;
  report.messages = corpus.size();
  report.threads = threads;
  report.seconds = clock.seconds();
  report.messages_per_second = report.seconds > 0.0 ? static_cast<double>(corpus.size()) / report.seconds : 0.0;
  write_scores(out, corpus, scores);
  return report;
}

// ---------------------------------------------------------------- evaluation

struct TargetResult {
  double target = 0.0;
  eval::RecallAtPrecision result;
};

struct EvalReport {
  std::string sampler_sha256;
  std::string model_sha256;
  std::size_t population = 0;
  std::size_t skipped_unlabeled = 0;
  eval::SamplingPlan plan;
  std::size_t judged_positive = 0;
  std::vector<TargetResult> targets;
  std::vector<eval::JudgedSample> samples;

  /// key=value lines in a fixed order.
  std::string to_text() const {
    std::string out;
    auto kv = [&](const std::string& k, const std::string& v) { out += k + "=" + v + "\n"; };
    kv("format", "hmclf-eval-report");
    kv("version", "1");
    kv("sampler_sha256", sampler_sha256);
    kv("model_sha256", model_sha256);
    kv("population", std::to_string(population));
    kv("skipped_unlabeled", std::to_string(skipped_unlabeled));
    kv("cutoff_s", format_g9(plan.cutoff_s));
    kv("g_plus", std::to_string(plan.g_plus));
    kv("g_minus", std::to_string(plan.g_minus));
    kv("m_s_plus", std::to_string(plan.m_s_plus));
    kv("m_s_minus", std::to_string(plan.m_s_minus));
    kv("k_ratio", format_g9(plan.k_ratio));
    kv("beta", format_g9(plan.beta()));
    kv("judged", std::to_string(samples.size()));
    kv("judged_positive", std::to_string(judged_positive));
    if (const auto w = eval::beta_warning(plan.beta())) kv("warning", *w);
    for (const auto& t : targets) {
      char key[32];
      std::snprintf(key, sizeof key, "adj_r_at_p%.2f", t.target);
      kv(std::string(key) + ".recall", format_g9(t.result.recall));
      kv(std::string(key) + ".precision", t.result.precision ? format_g9(*t.result.precision) : "undefined");
      kv(std::string(key) + ".threshold", t.result.threshold ? format_g9(*t.result.threshold) : "none");
    }
    return out;
  }
};

/// Scores the labeled part of a corpus with the sampling model psi_s and the
/// evaluated model psi_f, draws the stratified judged sample and reports
/// adjusted recall at each target precision.
inline EvalReport evaluate(const PipelineConfig& cfg, const fs::path& sampler_ckpt, const fs::path& model_ckpt,
                           const fs::path& vocab_dir, const fs::path& corpus_path) {
  const auto sampler_bytes = models::read_file_bytes(sampler_ckpt);
  const auto model_bytes = models::read_file_bytes(model_ckpt);
  const auto sampler = models::parse_checkpoint(sampler_bytes, sampler_ckpt.string());
  const auto model = models::parse_checkpoint(model_bytes, model_ckpt.string());
  const auto vocabs = load_vocabs(vocab_dir);
  sampler.model->check_vocabularies(vocabs);
  model.model->check_vocabularies(vocabs);

  EvalReport report;
  report.sampler_sha256 = sha256_hex(sampler_bytes);
  report.model_sha256 = sha256_hex(model_bytes);
  std::vector<EmailRecord> labeled;
  for (auto& r : read_corpus(corpus_path).records) {
    if (r.binary_gold()) labeled.push_back(std::move(r));
    else ++report.skipped_unlabeled;
  }
  const auto s = score_records(*sampler.model, vocabs, cfg.sequence, labeled, cfg.threads);
  const auto f = score_records(*model.model, vocabs, cfg.sequence, labeled, cfg.threads);
  std::vector<eval::ScoredItem> population;
  population.reserve(labeled.size());
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    population.push_back({labeled[i].message_id, s[i], f[i], *labeled[i].binary_gold()});
  }
  report.population = population.size();

  std::size_t g_plus = 0;
  for (const auto& p : population) g_plus += eval::group_of(p.score_s, cfg.eval.cutoff_s) == eval::Group::kSPlus;
  const std::size_t g_minus = population.size() - g_plus;
  auto take = [](std::size_t want, std::size_t have) { return want == 0 ? have : std::min(want, have); };
  report.plan = eval::make_plan(population, cfg.eval.cutoff_s, take(cfg.eval.sample_s_plus, g_plus),
                                take(cfg.eval.sample_s_minus, g_minus));
  report.samples = eval::stratified_sample(population, report.plan, derive_seed(cfg.seed, "eval-sample"));
  for (const auto& j : report.samples) report.judged_positive += static_cast<std::size_t>(j.gold);
  for (double t : cfg.eval.targets) {
    report.targets.push_back({t, eval::recall_at_precision(report.samples, report.plan.beta(), t)});
  }
  return report;
}

inline void write_judged_samples(const fs::path& path, std::span<const eval::JudgedSample> samples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write samples " + path.string());
  out << "message_id\tgroup\tscore_s\tscore_f\tgold\n";
  for (const auto& j : samples) {
    out << j.message_id << '\t' << eval::to_string(j.group) << '\t' << format_g9(j.score_s) << '\t'
        << format_g9(j.score_f) << '\t' << j.gold << '\n';
  }
}

// ---------------------------------------------------------------- report

inline std::string selectivity_text(std::span<const EmailRecord> corpus) {
  std::string out = "condition\tcount\thuman_pct\tmachine_pct\tunknown_pct\n";
  auto pct = [](const std::optional<double>& v) { return v ? format_g9(*v) : std::string("undefined"); };
  for (const auto& c : labels::selectivity_report(corpus)) {
    out += c.condition + "\t" + std::to_string(c.count) + "\t" + pct(c.human) + "\t" + pct(c.machine) + "\t" +
           pct(c.unknown) + "\n";
  }
  return out;
}

}  // namespace hmclf::pipeline
