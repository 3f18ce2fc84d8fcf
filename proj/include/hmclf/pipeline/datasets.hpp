#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hmclf/labels/action_labels.hpp"
#include "hmclf/labels/salutation.hpp"
#include "hmclf/util/random.hpp"

namespace hmclf::pipeline {

enum class Split { kTrain, kVal, kTest };

inline const char* to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

/// Assignment by a seeded hash of the message id, so a message keeps its
/// split whatever else is in the corpus.
inline Split split_of(std::string_view message_id, std::uint64_t seed, double val_fraction = 0.1,
                      double test_fraction = 0.1) {
  const double u = static_cast<double>(derive_seed(seed, message_id) >> 11) * 0x1.0p-53;
  if (u < test_fraction) return Split::kTest;
  if (u < test_fraction + val_fraction) return Split::kVal;
  return Split::kTrain;
}

struct AssembleOptions {
  /// Action labels come from the most recent `action_window_days` days; 0 keeps all.
  std::size_t action_window_days = 3;
  /// Copies of each hard example in the content and salutation sets.
  std::size_t hard_example_copies = 10;
  std::vector<std::string> hard_example_ids;
  std::uint64_t seed = 0;

  void validate() const {
    if (hard_example_copies < 10 || hard_example_copies > 50) {
      throw UsageError("hard_example_copies must be in [10, 50]");
    }
  }
};

/// Labeled message ids for the four sub-models. Sender-set ids point at one
/// representative message per sender.
struct TrainingSets {
  std::vector<MessageLabel> content;
  std::vector<MessageLabel> sender;
  std::vector<MessageLabel> action;
  std::vector<MessageLabel> salutation;
};

inline void require_both_labels(std::span<const MessageLabel> set, const char* name) {
  if (set.empty()) throw DataError(std::string(name) + " set is empty");
  const bool pos = std::any_of(set.begin(), set.end(), [](const MessageLabel& l) { return l.label == 1; });
  const bool neg = std::any_of(set.begin(), set.end(), [](const MessageLabel& l) { return l.label == 0; });
  if (!pos) throw DataError(std::string(name) + " set has no positive examples");
  if (!neg) throw DataError(std::string(name) + " set has no negative examples");
}

/// Records in the most recent `days` calendar days of the corpus.
inline std::vector<EmailRecord> recent_window(std::span<const EmailRecord> corpus, std::size_t days) {
  if (days == 0) return {corpus.begin(), corpus.end()};
  std::optional<std::int32_t> last;
  for (const auto& r : corpus) {
    if (!r.day) throw DataError("record " + r.message_id + " has no day; the action window needs one");
    last = std::max(last.value_or(r.day->value), r.day->value);
  }
  std::vector<EmailRecord> out;
  if (!last) return out;
  const std::int32_t first = *last - static_cast<std::int32_t>(days) + 1;
  for (const auto& r : corpus)
    if (r.day->value >= first) out.push_back(r);
  return out;
}

/// One representative (earliest message id) per sender with a majority gold
/// label; ties and unlabeled senders are dropped. The larger class is
/// subsampled so both classes have the same number of senders.
inline std::vector<MessageLabel> build_sender_set(std::span<const EmailRecord> corpus, std::uint64_t seed) {
  struct Tally {
    std::string representative;
    std::size_t human = 0, machine = 0;
  };
  std::map<std::string, Tally> senders;
  for (const auto& r : corpus) {
    const auto g = r.binary_gold();
    if (!g) continue;
    auto& t = senders[r.sender_address];
    if (t.representative.empty() || r.message_id < t.representative) t.representative = r.message_id;
    (*g == 1 ? t.human : t.machine) += 1;
  }
  std::vector<std::string> pos, neg;
  for (const auto& [address, t] : senders) {
    if (t.human > t.machine) pos.push_back(t.representative);
    else if (t.machine > t.human) neg.push_back(t.representative);
  }
  Rng rng(derive_seed(seed, "sender-balance"));
  auto& larger = pos.size() > neg.size() ? pos : neg;
  shuffle(larger.begin(), larger.end(), rng);
  larger.resize(std::min(pos.size(), neg.size()));
  std::vector<MessageLabel> out;
  for (const auto& id : pos) out.push_back({id, 1});
  for (const auto& id : neg) out.push_back({id, 0});
  std::sort(out.begin(), out.end());
  return out;
}

inline TrainingSets assemble_training_sets(std::span<const EmailRecord> corpus, const AssembleOptions& opt = {}) {
  opt.validate();
  TrainingSets sets;
  const std::unordered_set<std::string> hard(opt.hard_example_ids.begin(), opt.hard_example_ids.end());
  std::unordered_map<std::string, const EmailRecord*> by_id;
  for (const auto& r : corpus) by_id.emplace(r.message_id, &r);
  for (const auto& id : opt.hard_example_ids) {
    if (!by_id.contains(id)) throw DataError("hard example " + id + " is not in the corpus");
  }

  for (const auto& r : corpus) {
    const auto g = r.binary_gold();
    if (!g) continue;
    const std::size_t copies = hard.contains(r.message_id) ? opt.hard_example_copies : 1;
    for (std::size_t c = 0; c < copies; ++c) sets.content.push_back({r.message_id, *g});
  }
  std::sort(sets.content.begin(), sets.content.end());
  require_both_labels(sets.content, "content");

  // Same messages as the content set, relabeled by explicit salutation.
  sets.salutation.reserve(sets.content.size());
  for (const auto& l : sets.content) {
    const auto& r = *by_id.at(l.message_id);
    sets.salutation.push_back({l.message_id, labels::detect_salutation(r.body, r.recipient_names) ? 1 : 0});
  }
  require_both_labels(sets.salutation, "salutation");

  const auto window = recent_window(corpus, opt.action_window_days);
  sets.action = labels::build_action_labels(window);
  require_both_labels(sets.action, "action");

  sets.sender = build_sender_set(corpus, opt.seed);
  require_both_labels(sets.sender, "sender");
  return sets;
}

}  // namespace hmclf::pipeline
