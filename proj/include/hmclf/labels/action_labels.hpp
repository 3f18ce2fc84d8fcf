#pragma once

#include <algorithm>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "hmclf/labels/email_record.hpp"

namespace hmclf::labels {

inline bool in_set_a(const EmailRecord& r) { return r.opened && !r.deleted; }
inline bool in_set_b(const EmailRecord& r) { return !r.opened && r.deleted; }

/// A = opened and not deleted, B = deleted and not opened, plus the senders
/// that own at least one B message.
struct ActionSets {
  std::set<std::string> set_a;
  std::set<std::string> set_b;
  std::set<std::string> senders_b;
};

inline ActionSets build_action_sets(std::span<const EmailRecord> corpus) {
  ActionSets s;
  for (const auto& r : corpus) {
    if (in_set_a(r)) s.set_a.insert(r.message_id);
    if (in_set_b(r)) {
      s.set_b.insert(r.message_id);
      s.senders_b.insert(r.sender_address);
    }
  }
  return s;
}

/// Label 0 for every B message, label 1 for A messages whose sender never
/// appears in B (A\B); everything else is left out. Output is sorted by
/// message id so it does not depend on corpus order.
inline std::vector<MessageLabel> build_action_labels(std::span<const EmailRecord> corpus) {
  std::unordered_set<std::string> senders_b;
  for (const auto& r : corpus)
    if (in_set_b(r)) senders_b.insert(r.sender_address);
  std::vector<MessageLabel> out;
  for (const auto& r : corpus) {
    if (in_set_b(r)) out.push_back({r.message_id, 0});
    else if (in_set_a(r) && !senders_b.contains(r.sender_address)) out.push_back({r.message_id, 1});
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hmclf::labels
