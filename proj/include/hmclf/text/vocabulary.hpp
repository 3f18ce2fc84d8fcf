#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "hmclf/error.hpp"
#include "hmclf/text/tokenize.hpp"
#include "hmclf/util/sha256.hpp"

namespace hmclf::text {

inline constexpr std::int32_t kPadIndex = 0;
inline constexpr std::int32_t kOovIndex = 1;
inline constexpr int kVocabFormatVersion = 1;

enum class VocabKind { kWord, kTrigram };

inline const char* to_string(VocabKind k) { return k == VocabKind::kWord ? "word" : "trigram"; }

inline VocabKind vocab_kind_from_string(std::string_view s) {
  if (s == "word") return VocabKind::kWord;
  if (s == "trigram") return VocabKind::kTrigram;
  throw DataError("unknown vocabulary kind: " + std::string(s));
}

/// A tokenized document with a binary class label (-1 when unlabeled).
struct LabeledDocument {
  std::vector<std::string> tokens;
  int label = -1;
};

/// 2x2 chi-square statistic of token presence vs class over documents:
///   present/positive = a, present/negative = b, absent/positive = c, absent/negative = d.
/// A zero marginal yields 0.
inline double chi_square_statistic(double a, double b, double c, double d) {
  const double n = a + b + c + d;
  const double denom = (a + b) * (c + d) * (a + c) * (b + d);
  if (denom == 0.0) return 0.0;
  const double diff = a * d - b * c;
  return n * diff * diff / denom;
}

inline void require_both_classes(std::span<const LabeledDocument> docs) {
  bool pos = false, neg = false;
  for (const auto& d : docs) {
    pos |= d.label == 1;
    neg |= d.label == 0;
  }
  if (!pos || !neg) throw UsageError("chi-square needs at least one document of each class");
}

/// Chi-square score of one token over the labeled documents (unlabeled ones are ignored).
inline double chi_square_score(std::span<const LabeledDocument> docs, std::string_view token) {
  require_both_classes(docs);
  double a = 0, b = 0, c = 0, d = 0;
  for (const auto& doc : docs) {
    if (doc.label != 0 && doc.label != 1) continue;
    const bool present = std::find(doc.tokens.begin(), doc.tokens.end(), token) != doc.tokens.end();
    if (doc.label == 1) (present ? a : c) += 1;
    else (present ? b : d) += 1;
  }
  return chi_square_statistic(a, b, c, d);
}

class Vocabulary {
 public:
  Vocabulary() : Vocabulary(VocabKind::kWord, "", {}) {}

  /// `tokens` are the real tokens in index order; they receive indices 2, 3, ...
  Vocabulary(VocabKind kind, std::string name, std::vector<std::string> tokens)
      : kind_(kind), name_(std::move(name)) {
    tokens_ = {"<pad>", "<oov>"};
    for (auto& t : tokens) {
      if (t.empty()) throw UsageError("empty vocabulary token");
      if (!index_.emplace(t, static_cast<std::int32_t>(tokens_.size())).second) {
        throw UsageError("duplicate vocabulary token: " + t);
      }
      tokens_.push_back(std::move(t));
    }
    hash_ = compute_hash();
  }

  VocabKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::string& hash() const noexcept { return hash_; }
  const std::string& token(std::size_t i) const { return tokens_.at(i); }

  std::int32_t lookup(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? kOovIndex : it->second;
  }

  bool contains(std::string_view token) const { return index_.contains(std::string(token)); }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write vocabulary " + path);
    nlohmann::json header = {{"format", "hmclf-vocab"}, {"version", kVocabFormatVersion},
                             {"kind", to_string(kind_)}, {"name", name_},
                             {"tokenizer", kTokenizerVersion}, {"size", tokens_.size()},
                             {"hash", hash_}};
    out << header.dump() << '\n';
    for (std::size_t i = 2; i < tokens_.size(); ++i) out << escape(tokens_[i]) << '\t' << i << '\n';
  }

  static Vocabulary load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open vocabulary " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty vocabulary file");
    nlohmann::json header;
    try {
      header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ": bad vocabulary header: " + e.what());
    }
    if (header.value("format", "") != "hmclf-vocab" || header.value("version", 0) != kVocabFormatVersion) {
      throw DataError(path + ": unsupported vocabulary format");
    }
    if (header.value("tokenizer", 0) != kTokenizerVersion) {
      throw DataError(path + ": vocabulary built with a different tokenizer version");
    }
    std::vector<std::string> tokens;
    std::size_t expected = 2;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto tab = line.rfind('\t');
      if (tab == std::string::npos) throw DataError(path + ": malformed line " + std::to_string(expected));
      if (std::stoull(line.substr(tab + 1)) != expected) throw DataError(path + ": indices are not dense");
      tokens.push_back(unescape(line.substr(0, tab)));
      ++expected;
    }
    Vocabulary v(vocab_kind_from_string(header.at("kind").get<std::string>()),
                 header.value("name", std::string{}), std::move(tokens));
    if (v.size() != header.at("size").get<std::size_t>() || v.hash() != header.at("hash").get<std::string>()) {
      throw DataError(path + ": vocabulary content does not match its recorded hash");
    }
    return v;
  }

 private:
  std::string compute_hash() const {
    Sha256 h;
    h.update("hmclf-vocab\n").update(to_string(kind_)).update("\n");
    h.update(std::to_string(kTokenizerVersion)).update("\n");
    for (const auto& t : tokens_) h.update(t).update("\n");
    return h.hex();
  }

  static std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '\\': out += "\\\\"; break;
        case '\t': out += "\\t"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        default: out.push_back(c);
      }
    }
    return out;
  }

  static std::string unescape(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '\\' || i + 1 == s.size()) {
        out.push_back(s[i]);
        continue;
      }
      const char n = s[++i];
      out.push_back(n == 't' ? '\t' : n == 'n' ? '\n' : n == 'r' ? '\r' : n);
    }
    return out;
  }

  VocabKind kind_;
  std::string name_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> index_;
  std::string hash_;
};

/// Union of the top `n_freq` tokens by corpus frequency and the top `n_chi`
/// tokens by chi-square score (document presence vs label). Indices are
/// assigned by descending frequency, ties broken lexicographically.
inline Vocabulary build_vocabulary(std::span<const LabeledDocument> corpus, VocabKind kind, std::size_t n_freq,
                                   std::size_t n_chi, std::string name = {}) {
  if (n_freq + n_chi == 0) throw UsageError("vocabulary needs n_freq + n_chi > 0");
  if (corpus.empty()) throw UsageError("vocabulary corpus is empty");
  if (n_chi > 0) require_both_classes(corpus);

  struct Counts {
    std::uint64_t frequency = 0;
    double docs_pos = 0;
    double docs_neg = 0;
  };
  std::map<std::string, Counts> counts;  // ordered for a deterministic walk
  double n_pos = 0, n_neg = 0;
  std::unordered_set<std::string_view> seen;
  for (const auto& doc : corpus) {
    if (doc.label == 1) n_pos += 1;
    if (doc.label == 0) n_neg += 1;
    seen.clear();
    for (const auto& t : doc.tokens) {
      auto& c = counts[t];
      c.frequency += 1;
      if (seen.insert(t).second) {
        if (doc.label == 1) c.docs_pos += 1;
        if (doc.label == 0) c.docs_neg += 1;
      }
    }
  }

  struct Entry {
    const std::string* token;
    std::uint64_t frequency;
    double chi;
  };
  std::vector<Entry> entries;
  entries.reserve(counts.size());
  for (const auto& [token, c] : counts) {
    const double chi = n_chi > 0 ? chi_square_statistic(c.docs_pos, c.docs_neg, n_pos - c.docs_pos,
                                                         n_neg - c.docs_neg)
                                 : 0.0;
    entries.push_back({&token, c.frequency, chi});
  }

  auto by_freq = [](const Entry& a, const Entry& b) {
    return a.frequency != b.frequency ? a.frequency > b.frequency : *a.token < *b.token;
  };
  auto by_chi = [](const Entry& a, const Entry& b) { return a.chi != b.chi ? a.chi > b.chi : *a.token < *b.token; };

  std::unordered_set<const std::string*> chosen;
  std::vector<Entry> sorted = entries;
  std::sort(sorted.begin(), sorted.end(), by_freq);
  for (std::size_t i = 0; i < sorted.size() && i < n_freq; ++i) chosen.insert(sorted[i].token);
  if (n_chi > 0) {
    std::sort(sorted.begin(), sorted.end(), by_chi);
    for (std::size_t i = 0; i < sorted.size() && i < n_chi; ++i) chosen.insert(sorted[i].token);
  }

  std::vector<Entry> selected;
  for (const auto& e : entries)
    if (chosen.contains(e.token)) selected.push_back(e);
  std::sort(selected.begin(), selected.end(), by_freq);
  std::vector<std::string> tokens;
  tokens.reserve(selected.size());
  for (const auto& e : selected) tokens.push_back(*e.token);
  return Vocabulary(kind, std::move(name), std::move(tokens));
}

/// Maps tokens through `vocab` (unknown -> OOV), truncates at `length` and
/// right-pads with the padding index.
inline std::vector<std::int32_t> encode(std::span<const std::string> tokens, const Vocabulary& vocab,
                                        std::size_t length) {
  std::vector<std::int32_t> out(length, kPadIndex);
  for (std::size_t i = 0; i < tokens.size() && i < length; ++i) out[i] = vocab.lookup(tokens[i]);
  return out;
}

}  // namespace hmclf::text
