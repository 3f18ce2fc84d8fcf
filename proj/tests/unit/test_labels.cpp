#include <gtest/gtest.h>

#include <map>

#include "hmclf/labels/action_labels.hpp"
#include "hmclf/labels/salutation.hpp"
#include "hmclf/labels/selectivity.hpp"
#include "hmclf/util/random.hpp"

using namespace hmclf;
using namespace hmclf::labels;

namespace {

EmailRecord record(std::string id, std::string sender, bool opened, bool deleted,
                   std::optional<GoldLabel> gold = GoldLabel::kUnknown) {
  EmailRecord r;
  r.message_id = std::move(id);
  r.sender_address = std::move(sender);
  r.opened = opened;
  r.deleted = deleted;
  r.gold_label = gold;
  return r;
}

std::vector<EmailRecord> random_corpus(Rng& rng, std::size_t n) {
  std::vector<EmailRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(record("m" + std::to_string(i), "s" + std::to_string(uniform_index(rng, 40)), uniform01(rng) < 0.5,
                         uniform01(rng) < 0.5));
  }
  return out;
}

}  // namespace

TEST(ActionLabels, HandCases) {
  const std::vector<EmailRecord> corpus = {
      record("1", "alice", true, false), record("2", "shop", false, true), record("3", "bob", true, true),
      record("4", "shop", true, false), record("5", "carol", false, false)};
  const auto labels = build_action_labels(corpus);
  EXPECT_EQ(labels, (std::vector<MessageLabel>{{"1", 1}, {"2", 0}}));
  EXPECT_TRUE(build_action_labels({}).empty());
}

TEST(ActionLabels, SetsAreDisjointAndSendersBacked) {
  Rng rng(9);
  const auto corpus = random_corpus(rng, 500);
  const auto s = build_action_sets(corpus);
  for (const auto& id : s.set_a) EXPECT_FALSE(s.set_b.contains(id));
  for (const auto& sender : s.senders_b) {
    bool found = false;
    for (const auto& r : corpus) found |= r.sender_address == sender && s.set_b.contains(r.message_id);
    EXPECT_TRUE(found);
  }
}

TEST(ActionLabels, NoPositiveFromBSenderProperty) {
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const auto corpus = random_corpus(rng, 200);
    const auto s = build_action_sets(corpus);
    std::map<std::string, std::string> sender_of;
    for (const auto& r : corpus) sender_of[r.message_id] = r.sender_address;
    for (const auto& l : build_action_labels(corpus)) {
      if (l.label == 1) EXPECT_FALSE(s.senders_b.contains(sender_of[l.message_id]));
    }
  }
}

TEST(ActionLabels, IndependentOfRecordOrder) {
  Rng rng(12);
  auto corpus = random_corpus(rng, 300);
  const auto before = build_action_labels(corpus);
  const auto sal_before = build_salutation_labels(corpus);
  shuffle(corpus.begin(), corpus.end(), rng);
  EXPECT_EQ(build_action_labels(corpus), before);
  EXPECT_EQ(build_salutation_labels(corpus), sal_before);
}

TEST(Salutation, HandExamples) {
  const std::vector<std::string> john_smith = {"John Smith"};
  const std::vector<std::string> john = {"John"};
  EXPECT_TRUE(detect_salutation("Dear John, please find attached the report", john_smith));
  EXPECT_FALSE(detect_salutation("Unsubscribe from this newsletter anytime you want here", john));
  EXPECT_TRUE(detect_salutation("John here is the file we discussed yesterday ok", john));
  EXPECT_FALSE(detect_salutation("here is the file we discussed yesterday John", john));
  EXPECT_FALSE(detect_salutation("", john));
  EXPECT_FALSE(detect_salutation("Dear John,", {}));
}

TEST(Salutation, SegmentRules) {
  EXPECT_EQ(salutation_segment("Hi Maria, quick question"), (std::vector<std::string>{"hi", "maria"}));
  EXPECT_EQ(salutation_segment("one two three four five six seven eight nine ten eleven twelve").size(), 7u);
  EXPECT_TRUE(salutation_segment("").empty());
  // The comma rule takes precedence even past seven words.
  EXPECT_EQ(salutation_segment("a b c d e f g h, rest").size(), 8u);
}

TEST(Salutation, CaseInsensitive) {
  const std::vector<std::string> upper = {"MARIA LOPEZ"};
  const std::vector<std::string> lower = {"maria lopez"};
  EXPECT_TRUE(detect_salutation("hello maria, lunch?", upper));
  EXPECT_TRUE(detect_salutation("HELLO MARIA, lunch?", lower));
  EXPECT_TRUE(detect_salutation("Dear Ms. Lopez, thanks", lower));
}

TEST(Salutation, InputEncoding) {
  text::Vocabulary v(text::VocabKind::kWord, "sal", {"hi", "maria"});
  EXPECT_EQ(salutation_input("Hi Maria, quick question", v), (std::vector<std::int32_t>{2, 3, 0, 0, 0, 0, 0, 0, 0, 0}));
  EXPECT_EQ(salutation_input("", v), std::vector<std::int32_t>(10, 0));
  const auto twelve = salutation_input("hi hi hi hi hi hi hi hi hi hi hi hi", v);
  EXPECT_EQ(std::count(twelve.begin(), twelve.end(), 2), 7);
}

TEST(Salutation, LabelsOverCorpus) {
  EmailRecord a = record("a", "x", false, false);
  a.body = "Hey Ann, see you";
  a.recipient_names = {"Ann Lee"};
  EmailRecord b = record("b", "y", false, false);
  b.recipient_names = {"Ann Lee"};
  EmailRecord c = record("c", "z", false, false);
  c.body = "Hey Ann, see you";
  const std::vector<EmailRecord> corpus = {c, b, a};
  EXPECT_EQ(build_salutation_labels(corpus), (std::vector<MessageLabel>{{"a", 1}, {"b", 0}, {"c", 0}}));
}

TEST(Selectivity, PlantedCorpusApproachesPureColumns) {
  std::vector<EmailRecord> corpus;
  for (int i = 0; i < 100; ++i) corpus.push_back(record("h" + std::to_string(i), "p" + std::to_string(i), true, false, GoldLabel::kHuman));
  for (int i = 0; i < 300; ++i) corpus.push_back(record("m" + std::to_string(i), "bulk", false, true, GoldLabel::kMachine));
  const auto cols = selectivity_report(corpus);
  EXPECT_EQ(cols[0].condition, "random");
  EXPECT_DOUBLE_EQ(*cols[0].human, 25.0);
  EXPECT_DOUBLE_EQ(*cols[3].human, 100.0);
  EXPECT_DOUBLE_EQ(*cols[3].machine, 0.0);
  EXPECT_DOUBLE_EQ(*cols[2].machine, 100.0);
  for (const auto& c : cols) EXPECT_NEAR(*c.human + *c.machine + *c.unknown, 100.0, 0.01);
}

TEST(Selectivity, EmptyColumnIsUndefined) {
  const std::vector<EmailRecord> corpus = {record("1", "a", true, false, std::nullopt)};
  const auto cols = selectivity_report(corpus);
  EXPECT_FALSE(cols[2].human.has_value());
  EXPECT_EQ(cols[2].count, 0u);
  EXPECT_DOUBLE_EQ(*cols[1].unknown, 100.0);
}
