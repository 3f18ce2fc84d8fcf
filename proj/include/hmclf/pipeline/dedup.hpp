#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "hmclf/labels/email_record.hpp"

namespace hmclf::pipeline {

inline constexpr std::size_t kDefaultPerDayCap = 5;

/// Keeps one record per (sender, subject, day), then at most `per_day_cap`
/// records per sender per day. Survivors are the earliest by message id and
/// come back sorted by message id.
inline std::vector<EmailRecord> dedup_and_cap(std::span<const EmailRecord> corpus,
                                              std::size_t per_day_cap = kDefaultPerDayCap) {
  if (per_day_cap == 0) throw UsageError("per_day_cap must be positive");
  std::vector<const EmailRecord*> order;
  order.reserve(corpus.size());
  for (const auto& r : corpus) {
    if (!r.day) throw DataError("record " + r.message_id + " has no day; dedup needs one");
    order.push_back(&r);
  }
  std::sort(order.begin(), order.end(),
            [](const EmailRecord* a, const EmailRecord* b) { return a->message_id < b->message_id; });

  std::set<std::tuple<std::string_view, std::string_view, std::int32_t>> seen;
  std::map<std::pair<std::string_view, std::int32_t>, std::size_t> per_day;
  std::vector<EmailRecord> out;
  for (const auto* r : order) {
    if (!seen.emplace(r->sender_address, r->subject, r->day->value).second) continue;
    auto& n = per_day[{r->sender_address, r->day->value}];
    if (n >= per_day_cap) continue;
    ++n;
    out.push_back(*r);
  }
  return out;
}

}  // namespace hmclf::pipeline
