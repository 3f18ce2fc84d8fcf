#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hmclf/pipeline/stages.hpp"
#include "support/pipeline_fixtures.hpp"

using namespace hmclf;
using namespace hmclf::pipeline;
using hmclf::testing::TempDir;

namespace {

EmailRecord make_record(std::string id, std::string sender, std::string subject, const char* day) {
  EmailRecord r;
  r.message_id = std::move(id);
  r.sender_address = std::move(sender);
  r.subject = std::move(subject);
  r.body = "hello there";
  r.day = Day::parse(day);
  r.gold_label = GoldLabel::kMachine;
  return r;
}

std::vector<EmailRecord> small_corpus(std::uint64_t seed, std::size_t n = 2000) {
  SynthSpec spec;
  spec.n_messages = n;
  spec.seed = seed;
  return generate_corpus(spec);
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Reference dedup: quadratic scan over records in id order.
std::vector<EmailRecord> dedup_oracle(std::vector<EmailRecord> corpus, std::size_t cap) {
  std::sort(corpus.begin(), corpus.end(),
            [](const EmailRecord& a, const EmailRecord& b) { return a.message_id < b.message_id; });
  std::vector<EmailRecord> kept;
  for (const auto& r : corpus) {
    bool duplicate = false;
    std::size_t same_day = 0;
    for (const auto& k : kept) {
      if (k.sender_address == r.sender_address && k.day == r.day) {
        ++same_day;
        if (k.subject == r.subject) duplicate = true;
      }
    }
    if (!duplicate && same_day < cap) kept.push_back(r);
  }
  return kept;
}

}  // namespace

// ---------------------------------------------------------------- records

TEST(CorpusIo, GeneratedRecordsRoundTrip) {
  for (const auto& r : small_corpus(11)) EXPECT_EQ(parse_record(serialize_record(r)), r);
}

TEST(CorpusIo, OptionalFieldsRoundTrip) {
  EmailRecord r;
  r.message_id = "x1";
  r.sender_address = "a@b.c";
  r.body = "quote \" backslash \\ tab \t newline \n done";
  EXPECT_EQ(parse_record(serialize_record(r)), r);
  r.day = Day::parse("2024-02-29");
  r.gold_label = GoldLabel::kUnknown;
  EXPECT_EQ(parse_record(serialize_record(r)), r);
}

TEST(CorpusIo, MalformedRecordsAreDataErrors) {
  EXPECT_THROW(parse_record("not json"), DataError);
  EXPECT_THROW(parse_record(R"({"sender_address":"a","opened":true,"deleted":false})"), DataError);
  EXPECT_THROW(parse_record(R"({"message_id":"","sender_address":"a","opened":true,"deleted":false})"), DataError);
  EXPECT_THROW(parse_record(R"({"message_id":"m","sender_address":"a","opened":1,"deleted":false})"), DataError);
  EXPECT_THROW(parse_record(R"({"message_id":"m","sender_address":"a","opened":true,"deleted":false,"day":"2024-13-01"})"),
               DataError);
  EXPECT_THROW(
      parse_record(R"({"message_id":"m","sender_address":"a","opened":true,"deleted":false,"gold_label":"robot"})"),
      DataError);
}

TEST(CorpusIo, MalformedLinesCountedUpToThreshold) {
  TempDir dir("corpus");
  const auto corpus = small_corpus(5, 200);
  auto write_with_bad = [&](std::size_t bad) {
    std::ofstream out(dir / "c.jsonl", std::ios::binary);
    out << corpus_header() << '\n';
    for (std::size_t i = 0; i < corpus.size(); ++i) out << (i < bad ? "{broken" : serialize_record(corpus[i])) << '\n';
  };
  write_with_bad(2);  // exactly 1% of 200
  const auto ok = read_corpus(dir / "c.jsonl");
  EXPECT_EQ(ok.malformed, 2u);
  EXPECT_EQ(ok.records.size(), 198u);
  EXPECT_FALSE(ok.errors.empty());
  write_with_bad(3);
  EXPECT_THROW(read_corpus(dir / "c.jsonl"), DataError);
  EXPECT_NO_THROW(read_corpus(dir / "c.jsonl", 0.05));
}

TEST(CorpusIo, DuplicateIdsAreMalformed) {
  TempDir dir("corpus");
  auto corpus = small_corpus(5, 200);
  corpus[7].message_id = corpus[3].message_id;
  write_corpus(dir / "c.jsonl", corpus);
  const auto res = read_corpus(dir / "c.jsonl");
  EXPECT_EQ(res.malformed, 1u);
  EXPECT_EQ(res.records.size(), 199u);
}

TEST(CorpusIo, HeaderIsRequired) {
  TempDir dir("corpus");
  {
    std::ofstream out(dir / "c.jsonl");
    out << serialize_record(small_corpus(1, 1).front()) << '\n';
  }
  EXPECT_THROW(read_corpus(dir / "c.jsonl"), DataError);
  EXPECT_THROW(read_corpus(dir / "missing.jsonl"), DataError);
}

TEST(CorpusIo, LabelFileRoundTrip) {
  TempDir dir("labels");
  const std::vector<MessageLabel> labels{{"a", 1}, {"b", 0}, {"c", 1}};
  write_labels(dir / "l.tsv", labels);
  EXPECT_EQ(read_labels(dir / "l.tsv"), labels);
  EXPECT_EQ(read_text(dir / "l.tsv"), "a\t1\nb\t0\nc\t1\n");
  {
    std::ofstream out(dir / "bad.tsv");
    out << "a\t2\n";
  }
  EXPECT_THROW(read_labels(dir / "bad.tsv"), DataError);
}

// ---------------------------------------------------------------- dedup

TEST(Dedup, SameSenderSubjectDayKeepsOne) {
  const std::vector<EmailRecord> corpus{make_record("m2", "s@x", "hi", "2024-01-01"),
                                        make_record("m1", "s@x", "hi", "2024-01-01")};
  const auto out = dedup_and_cap(corpus);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].message_id, "m1");
}

TEST(Dedup, DifferentDayOrSubjectSurvives) {
  const std::vector<EmailRecord> corpus{make_record("m1", "s@x", "hi", "2024-01-01"),
                                        make_record("m2", "s@x", "hi", "2024-01-02"),
                                        make_record("m3", "s@x", "hello", "2024-01-01"),
                                        make_record("m4", "t@x", "hi", "2024-01-01")};
  EXPECT_EQ(dedup_and_cap(corpus).size(), 4u);
}

TEST(Dedup, CapKeepsEarliestIds) {
  std::vector<EmailRecord> corpus;
  for (int i = 99; i >= 0; --i) {
    char id[8];
    std::snprintf(id, sizeof id, "m%03d", i);
    corpus.push_back(make_record(id, "bulk@x", "offer " + std::to_string(i), "2024-01-01"));
  }
  const auto out = dedup_and_cap(corpus, 5);
  ASSERT_EQ(out.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(out[static_cast<std::size_t>(i)].message_id, "m00" + std::to_string(i));
}

TEST(Dedup, UniqueCorpusUnchanged) {
  const std::vector<EmailRecord> corpus{make_record("m1", "a@x", "s", "2024-01-01"),
                                        make_record("m2", "b@x", "s", "2024-01-01")};
  EXPECT_EQ(dedup_and_cap(corpus), corpus);
}

TEST(Dedup, MatchesOracleAndIsIdempotent) {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<EmailRecord> corpus;
    const std::size_t n = 50 + uniform_index(rng, 150);
    for (std::size_t i = 0; i < n; ++i) {
      corpus.push_back(make_record("m" + std::to_string(uniform_index(rng, 1000000)) + "_" + std::to_string(i),
                                   "s" + std::to_string(uniform_index(rng, 4)),
                                   "subj" + std::to_string(uniform_index(rng, 6)),
                                   uniform01(rng) < 0.5 ? "2024-01-01" : "2024-01-02"));
    }
    const std::size_t cap = 1 + uniform_index(rng, 6);
    const auto once = dedup_and_cap(corpus, cap);
    EXPECT_EQ(once, dedup_oracle(corpus, cap));
    EXPECT_EQ(dedup_and_cap(once, cap), once);
  }
}

TEST(Dedup, RequiresDayAndPositiveCap) {
  auto r = make_record("m1", "s", "x", "2024-01-01");
  EXPECT_THROW(dedup_and_cap(std::vector<EmailRecord>{r}, 0), UsageError);
  r.day.reset();
  EXPECT_THROW(dedup_and_cap(std::vector<EmailRecord>{r}), DataError);
}

// ---------------------------------------------------------------- generator

TEST(Generator, SameSeedSameBytes) {
  SynthSpec spec;
  spec.n_messages = 3000;
  spec.seed = 9;
  const auto a = generate_corpus(spec);
  const auto b = generate_corpus(spec);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(serialize_record(a[i]), serialize_record(b[i]));
  spec.seed = 10;
  EXPECT_NE(serialize_record(generate_corpus(spec)[0]), serialize_record(a[0]));
}

TEST(Generator, HumanCountIsBinomial) {
  SynthSpec spec;
  spec.n_messages = 20000;
  spec.human_fraction = 0.05;
  spec.unknown_rate = 0.0;
  spec.seed = 1;
  const auto corpus = generate_corpus(spec);
  std::size_t humans = 0;
  for (const auto& r : corpus) humans += r.gold_label == GoldLabel::kHuman;
  const double sd = std::sqrt(20000 * 0.05 * 0.95);
  EXPECT_LT(std::abs(static_cast<double>(humans) - 1000.0), 4.0 * sd);
}

TEST(Generator, SelectivityFollowsTableDirection) {
  SynthSpec spec;
  spec.seed = 2;
  const auto cols = labels::selectivity_report(generate_corpus(spec));
  const double random = *cols[0].human, a = *cols[1].human, b = *cols[2].human, a_not_b = *cols[3].human;
  EXPECT_GT(a_not_b, a);
  EXPECT_GT(a, random);
  EXPECT_GT(random, b);
}

TEST(Generator, IdsFollowDayOrder) {
  const auto corpus = small_corpus(4);
  for (std::size_t i = 1; i < corpus.size(); ++i) {
    EXPECT_LT(corpus[i - 1].message_id, corpus[i].message_id);
    EXPECT_LE(*corpus[i - 1].day, *corpus[i].day);
  }
}

TEST(Generator, RejectsInvalidSpec) {
  SynthSpec spec;
  spec.human_fraction = 1.5;
  EXPECT_THROW(generate_corpus(spec), UsageError);
  spec = {};
  spec.human_actions = {0.6, 0.3, 0.2};
  EXPECT_THROW(generate_corpus(spec), UsageError);
  spec = {};
  spec.n_messages = 0;
  EXPECT_THROW(generate_corpus(spec), UsageError);
}

// ---------------------------------------------------------------- training sets

TEST(Assemble, SalutationSetMirrorsContentSet) {
  const auto corpus = dedup_and_cap(small_corpus(6));
  const auto sets = assemble_training_sets(corpus);
  ASSERT_EQ(sets.salutation.size(), sets.content.size());
  for (std::size_t i = 0; i < sets.content.size(); ++i) {
    EXPECT_EQ(sets.salutation[i].message_id, sets.content[i].message_id);
  }
}

TEST(Assemble, ContentSetSkipsUnknownGold) {
  const auto corpus = dedup_and_cap(small_corpus(6));
  std::size_t labeled = 0;
  for (const auto& r : corpus) labeled += r.binary_gold().has_value();
  EXPECT_EQ(assemble_training_sets(corpus).content.size(), labeled);
}

TEST(Assemble, SenderSetIsBalancedOnePerSender) {
  const auto corpus = dedup_and_cap(small_corpus(6, 5000));
  const auto sets = assemble_training_sets(corpus);
  std::size_t pos = 0;
  std::set<std::string> senders;
  std::unordered_map<std::string, const EmailRecord*> by_id;
  for (const auto& r : corpus) by_id[r.message_id] = &r;
  for (const auto& l : sets.sender) {
    pos += static_cast<std::size_t>(l.label);
    EXPECT_TRUE(senders.insert(by_id.at(l.message_id)->sender_address).second);
  }
  EXPECT_EQ(2 * pos, sets.sender.size());
}

TEST(Assemble, ActionSetUsesRecentWindow) {
  const auto corpus = dedup_and_cap(small_corpus(6));
  std::int32_t last = 0;
  for (const auto& r : corpus) last = std::max(last, r.day->value);
  std::unordered_map<std::string, std::int32_t> day_of;
  for (const auto& r : corpus) day_of[r.message_id] = r.day->value;
  const auto sets = assemble_training_sets(corpus);
  for (const auto& l : sets.action) EXPECT_GE(day_of.at(l.message_id), last - 2);
  AssembleOptions all;
  all.action_window_days = 0;
  EXPECT_GT(assemble_training_sets(corpus, all).action.size(), sets.action.size());
}

TEST(Assemble, NoOpenedMessagesFailsOnActionSet) {
  auto corpus = dedup_and_cap(small_corpus(6));
  for (auto& r : corpus) r.opened = false;
  try {
    assemble_training_sets(corpus);
    FAIL() << "expected a data error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("action"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("positive"), std::string::npos);
  }
}

TEST(Assemble, HardExamplesAreDuplicated) {
  const auto corpus = dedup_and_cap(small_corpus(6));
  const auto base = assemble_training_sets(corpus);
  AssembleOptions opt;
  opt.hard_example_ids = {base.content[0].message_id, base.content[5].message_id};
  opt.hard_example_copies = 25;
  const auto sets = assemble_training_sets(corpus, opt);
  EXPECT_EQ(sets.content.size(), base.content.size() + 2 * 24);
  EXPECT_EQ(sets.salutation.size(), sets.content.size());
  EXPECT_EQ(std::count_if(sets.content.begin(), sets.content.end(),
                          [&](const MessageLabel& l) { return l.message_id == base.content[5].message_id; }),
            25);
  opt.hard_example_copies = 9;
  EXPECT_THROW(assemble_training_sets(corpus, opt), UsageError);
  opt.hard_example_copies = 51;
  EXPECT_THROW(assemble_training_sets(corpus, opt), UsageError);
  opt.hard_example_copies = 10;
  opt.hard_example_ids = {"no-such-id"};
  EXPECT_THROW(assemble_training_sets(corpus, opt), DataError);
}

TEST(Split, DeterministicWithExpectedFractions) {
  std::size_t counts[3] = {0, 0, 0};
  for (int i = 0; i < 20000; ++i) {
    const auto id = "m" + std::to_string(i);
    const auto s = split_of(id, 5);
    EXPECT_EQ(s, split_of(id, 5));
    ++counts[static_cast<int>(s)];
  }
  const double sd = std::sqrt(20000 * 0.1 * 0.9);
  EXPECT_LT(std::abs(static_cast<double>(counts[1]) - 2000.0), 4 * sd);
  EXPECT_LT(std::abs(static_cast<double>(counts[2]) - 2000.0), 4 * sd);
}

// ---------------------------------------------------------------- stages

class TinyPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir("pipeline");
    cfg_ = hmclf::testing::tiny_config();
    hmclf::testing::prepare_inputs(cfg_, dir_->path());
    train_all(cfg_, dir_->path() / "sets", dir_->path() / "vocab", dir_->path() / "models");
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static std::filesystem::path path(const std::string& rel) { return dir_->path() / rel; }

  static TempDir* dir_;
  static PipelineConfig cfg_;
};

TempDir* TinyPipeline::dir_ = nullptr;
PipelineConfig TinyPipeline::cfg_;

TEST_F(TinyPipeline, TrainWritesAllCheckpointsWithManifest) {
  for (const char* k : {"content", "sender", "action", "salutation", "full"}) {
    EXPECT_TRUE(std::filesystem::exists(path(std::string("models/") + k + ".ckpt"))) << k;
  }
  const auto full = models::load_checkpoint(path("models/full.ckpt"));
  const auto& manifest = full.header.at("manifest");
  for (const char* k : {"content", "sender", "action", "salutation"}) {
    EXPECT_EQ(manifest.at(k).at("sha256").get<std::string>(),
              sha256_file(path(std::string("models/") + k + ".ckpt").string()));
  }
  EXPECT_EQ(full.header.at("metadata").at("status"), "ok");
}

TEST_F(TinyPipeline, PredictIsThreadInvariant) {
  predict_batch(path("models/full.ckpt"), path("vocab"), path("corpus.jsonl"), path("s1.tsv"), 1);
  const auto report = predict_batch(path("models/full.ckpt"), path("vocab"), path("corpus.jsonl"), path("s8.tsv"), 8);
  EXPECT_EQ(read_text(path("s1.tsv")), read_text(path("s8.tsv")));
  EXPECT_EQ(report.messages, read_corpus(path("corpus.jsonl")).records.size());
  EXPECT_GT(report.messages_per_second, 0.0);
}

TEST_F(TinyPipeline, PredictOutputFollowsInputOrder) {
  predict_batch(path("models/content.ckpt"), path("vocab"), path("corpus.jsonl"), path("c.tsv"), 3);
  const auto corpus = read_corpus(path("corpus.jsonl")).records;
  std::istringstream lines(read_text(path("c.tsv")));
  std::string line;
  std::size_t i = 0;
  while (std::getline(lines, line)) {
    ASSERT_LT(i, corpus.size());
    EXPECT_EQ(line.substr(0, line.find('\t')), corpus[i].message_id);
    const double p = std::stod(line.substr(line.find('\t') + 1));
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    ++i;
  }
  EXPECT_EQ(i, corpus.size());
}

TEST_F(TinyPipeline, PredictEmptyCorpus) {
  write_corpus(path("empty.jsonl"), {});
  const auto report = predict_batch(path("models/full.ckpt"), path("vocab"), path("empty.jsonl"), path("e.tsv"), 4);
  EXPECT_EQ(report.messages, 0u);
  EXPECT_EQ(report.messages_per_second, 0.0);
  EXPECT_EQ(read_text(path("e.tsv")), "");
}

TEST_F(TinyPipeline, VocabMismatchFailsBeforeScoring) {
  auto other = hmclf::testing::tiny_config(99);
  const auto w = Workspace::load(path("sets"));
  other.vocab.words_freq = 50;
  save_vocabs(build_vocabs(other, w), path("vocab-other"));
  std::filesystem::remove(path("never.tsv"));
  EXPECT_THROW(predict_batch(path("models/full.ckpt"), path("vocab-other"), path("corpus.jsonl"), path("never.tsv"), 1),
               DataError);
  EXPECT_FALSE(std::filesystem::exists(path("never.tsv")));
}

TEST_F(TinyPipeline, WholePopulationPlanMatchesDirectMetrics) {
  auto cfg = cfg_;
  cfg.eval.sample_s_plus = 0;
  cfg.eval.sample_s_minus = 0;
  const auto report = evaluate(cfg, path("models/content.ckpt"), path("models/full.ckpt"), path("vocab"),
                               path("corpus.jsonl"));
  EXPECT_EQ(report.samples.size(), report.population);
  EXPECT_DOUBLE_EQ(report.plan.beta(), 1.0);
  // Direct recall-at-precision on the full population.
  const auto corpus = read_corpus(path("corpus.jsonl")).records;
  const auto vocabs = load_vocabs(path("vocab"));
  const auto model = models::load_checkpoint(path("models/full.ckpt"));
  std::vector<EmailRecord> labeled;
  for (const auto& r : corpus)
    if (r.binary_gold()) labeled.push_back(r);
  const auto f = score_records(*model.model, vocabs, cfg.sequence, labeled, 1);
  for (const auto& t : report.targets) {
    double best = 0.0;
    for (double thr : f) {
      double tp = 0, fp = 0, pos = 0;
      for (std::size_t i = 0; i < labeled.size(); ++i) {
        const bool g = *labeled[i].binary_gold() == 1;
        pos += g;
        if (f[i] >= thr) (g ? tp : fp) += 1;
      }
      if (tp / (tp + fp) >= t.target) best = std::max(best, tp / pos);
    }
    EXPECT_EQ(t.result.recall, best) << t.target;
  }
}

TEST_F(TinyPipeline, SameSamplerAndModelKeepsPrecision) {
  const auto report = evaluate(cfg_, path("models/content.ckpt"), path("models/content.ckpt"), path("vocab"),
                               path("corpus.jsonl"));
  // With psi_f = psi_s every f+ item sits in s+, so beta never touches precision.
  for (double thr : {cfg_.eval.cutoff_s, 0.7, 0.9}) {
    const auto c = eval::confusion_at(report.samples, thr, report.plan.beta());
    const auto adj = eval::adjusted_metrics(c), raw = eval::unadjusted_metrics(c);
    ASSERT_EQ(adj.precision.has_value(), raw.precision.has_value());
    if (adj.precision) EXPECT_NEAR(*adj.precision, *raw.precision, 1e-12);
  }
}

TEST_F(TinyPipeline, EvalReportIsDeterministic) {
  const auto a = evaluate(cfg_, path("models/content.ckpt"), path("models/full.ckpt"), path("vocab"),
                          path("corpus.jsonl"))
                     .to_text();
  const auto b = evaluate(cfg_, path("models/content.ckpt"), path("models/full.ckpt"), path("vocab"),
                          path("corpus.jsonl"))
                     .to_text();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("format=hmclf-eval-report\nversion=1\n", 0), 0u);
  EXPECT_NE(a.find("adj_r_at_p0.90.recall="), std::string::npos);
  EXPECT_LT(a.find("adj_r_at_p0.90.recall="), a.find("adj_r_at_p0.96.recall="));
}

TEST_F(TinyPipeline, DivergenceSavesLastFiniteState) {
  auto cfg = cfg_;
  cfg.train.learning_rate = 1e30;
  cfg.train.max_steps = 20;
  EXPECT_THROW(train_all(cfg, path("sets"), path("vocab"), path("diverged")), DivergenceError);
  const auto ck = models::load_checkpoint(path("diverged/content.ckpt"));
  EXPECT_EQ(ck.header.at("metadata").at("status"), "diverged");
  for (const auto* p : ck.model->parameters())
    for (float v : p->tensor.data()) ASSERT_TRUE(std::isfinite(v)) << p->name;
}
