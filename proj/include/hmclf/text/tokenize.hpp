#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hmclf::text {

/// Tokenizer rule version; vocabularies and checkpoints record it.
inline constexpr int kTokenizerVersion = 1;

/// ASCII letters and digits plus every non-ASCII byte (so UTF-8 sequences stay
/// inside words). Everything else separates tokens and is dropped.
inline bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

/// Lowercases and splits on whitespace and punctuation; punctuation is discarded.
inline std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (is_word_byte(static_cast<unsigned char>(ch))) {
      cur.push_back(ascii_lower(ch));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

/// Letter trigrams of a lowercased address wrapped in '#' boundary markers.
/// The address is first truncated to `max_chars` raw characters. A string of
/// n >= 1 characters yields exactly n trigrams.
inline std::vector<std::string> letter_trigrams(std::string_view address, std::size_t max_chars = 1000) {
  std::vector<std::string> out;
  if (address.empty()) return out;
  std::string padded = "#";
  for (std::size_t i = 0; i < address.size() && i < max_chars; ++i) padded.push_back(ascii_lower(address[i]));
  padded.push_back('#');
  out.reserve(padded.size() - 2);
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) out.push_back(padded.substr(i, 3));
  return out;
}

}  // namespace hmclf::text
