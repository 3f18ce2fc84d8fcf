#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hmclf/error.hpp"

namespace hmclf {

enum class GoldLabel { kHuman, kMachine, kUnknown };

inline const char* to_string(GoldLabel g) {
  switch (g) {
    case GoldLabel::kHuman: return "human";
    case GoldLabel::kMachine: return "machine";
    case GoldLabel::kUnknown: return "unknown";
  }
  return "unknown";
}

inline GoldLabel gold_from_string(std::string_view s) {
  if (s == "human") return GoldLabel::kHuman;
  if (s == "machine") return GoldLabel::kMachine;
  if (s == "unknown") return GoldLabel::kUnknown;
  throw DataError("unknown gold label: " + std::string(s));
}

/// Calendar day stored as days since 1970-01-01.
struct Day {
  std::int32_t value = 0;

  static Day from_ymd(int y, unsigned m, unsigned d) {
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) throw DataError("invalid date");
    return Day{static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count())};
  }

  static Day parse(std::string_view iso) {
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = 0;
    const std::string s(iso);
    if (s.size() != 10 || std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
      throw DataError("malformed day (want YYYY-MM-DD): " + s);
    }
    return from_ymd(y, m, d);
  }

  std::string iso() const {
    const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{value}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
  }

  auto operator<=>(const Day&) const = default;
};

/// One message with its behavioral signals and optional editorial label.
struct EmailRecord {
  std::string message_id;
  std::string sender_address;
  std::string sender_name;
  std::string subject;
  std::string body;
  std::vector<std::string> recipient_names;
  bool opened = false;
  bool deleted = false;
  std::optional<Day> day;
  std::optional<GoldLabel> gold_label;

  bool operator==(const EmailRecord&) const = default;

  /// 1 for human, 0 for machine, nullopt when unlabeled or unknown.
  std::optional<int> binary_gold() const {
    if (!gold_label || *gold_label == GoldLabel::kUnknown) return std::nullopt;
    return *gold_label == GoldLabel::kHuman ? 1 : 0;
  }
};

/// (message id, binary label) pair emitted by the label generators.
struct MessageLabel {
  std::string message_id;
  int label = 0;

  bool operator==(const MessageLabel&) const = default;
  auto operator<=>(const MessageLabel&) const = default;
};

}  // namespace hmclf
