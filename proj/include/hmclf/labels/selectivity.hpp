#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>

#include "hmclf/labels/action_labels.hpp"

namespace hmclf::labels {

/// Human/machine/unknown percentages of the messages selected by one action
/// condition. Percentages are undefined when the condition selects nothing.
struct SelectivityColumn {
  std::string condition;
  std::size_t count = 0;
  std::optional<double> human;
  std::optional<double> machine;
  std::optional<double> unknown;
};

/// Columns in the order random (every message), A, B, A\B. Records without
/// a gold label count as unknown.
inline std::array<SelectivityColumn, 4> selectivity_report(std::span<const EmailRecord> corpus) {
  std::unordered_set<std::string> senders_b;
  for (const auto& r : corpus)
    if (in_set_b(r)) senders_b.insert(r.sender_address);

  std::array<SelectivityColumn, 4> cols{{{"random"}, {"A"}, {"B"}, {"A\\B"}}};
  std::array<std::array<std::size_t, 3>, 4> tally{};
  auto add = [&](std::size_t col, const EmailRecord& r) {
    const GoldLabel g = r.gold_label.value_or(GoldLabel::kUnknown);
    tally[col][static_cast<std::size_t>(g)] += 1;
  };
  for (const auto& r : corpus) {
    add(0, r);
    if (in_set_a(r)) add(1, r);
    if (in_set_b(r)) add(2, r);
    if (in_set_a(r) && !senders_b.contains(r.sender_address)) add(3, r);
  }
  for (std::size_t c = 0; c < 4; ++c) {
    const std::size_t n = tally[c][0] + tally[c][1] + tally[c][2];
    cols[c].count = n;
    if (n == 0) continue;
    cols[c].human = 100.0 * static_cast<double>(tally[c][0]) / static_cast<double>(n);
    cols[c].machine = 100.0 * static_cast<double>(tally[c][1]) / static_cast<double>(n);
    cols[c].unknown = 100.0 * static_cast<double>(tally[c][2]) / static_cast<double>(n);
  }
  return cols;
}

}  // namespace hmclf::labels
