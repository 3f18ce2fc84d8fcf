#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hmclf/labels/email_record.hpp"
#include "hmclf/text/tokenize.hpp"
#include "hmclf/text/vocabulary.hpp"

namespace hmclf::labels {

inline constexpr std::size_t kSalutationWordLimit = 7;

/// Beginning of the body: the words before the first comma, or the first 7
/// words when the body has no comma.
inline std::vector<std::string> salutation_segment(std::string_view body) {
  const auto comma = body.find(',');
  if (comma != std::string_view::npos) return text::tokenize_words(body.substr(0, comma));
  auto words = text::tokenize_words(body);
  if (words.size() > kSalutationWordLimit) words.resize(kSalutationWordLimit);
  return words;
}

/// True iff some recipient-name token appears in the beginning segment
/// (case-insensitive, token equality).
inline bool detect_salutation(std::string_view body, std::span<const std::string> recipient_names) {
  if (body.empty() || recipient_names.empty()) return false;
  const auto segment = salutation_segment(body);
  for (const auto& name : recipient_names) {
    for (const auto& token : text::tokenize_words(name)) {
      if (std::find(segment.begin(), segment.end(), token) != segment.end()) return true;
    }
  }
  return false;
}

inline std::vector<MessageLabel> build_salutation_labels(std::span<const EmailRecord> corpus) {
  std::vector<MessageLabel> out;
  out.reserve(corpus.size());
  for (const auto& r : corpus) out.push_back({r.message_id, detect_salutation(r.body, r.recipient_names) ? 1 : 0});
  std::sort(out.begin(), out.end());
  return out;
}

/// Encoded salutation-model input: the beginning segment mapped through the
/// salutation vocabulary at a fixed length.
inline std::vector<std::int32_t> salutation_input(std::string_view body, const text::Vocabulary& vocab,
                                                  std::size_t length = 10) {
  const auto segment = salutation_segment(body);
  return text::encode(segment, vocab, length);
}

}  // namespace hmclf::labels
