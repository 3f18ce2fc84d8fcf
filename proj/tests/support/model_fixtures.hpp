#pragma once

#include <memory>
#include <vector>

#include "hmclf/models/full_model.hpp"
#include "hmclf/util/random.hpp"

namespace hmclf::testing {

inline constexpr std::size_t kTinyVocab = 60;

/// Real tokens occupy a prefix of `length` positions; the rest is padding.
inline std::vector<std::int32_t> random_ids(Rng& rng, std::size_t length, std::size_t real, std::int32_t lo,
                                            std::int32_t hi) {
  std::vector<std::int32_t> out(length, 0);
  for (std::size_t i = 0; i < real && i < length; ++i) {
    out[i] = lo + static_cast<std::int32_t>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo)));
  }
  return out;
}

/// Message whose tokens come from a class-specific id range, so every model
/// can separate the classes from any of its inputs.
inline models::EncodedMessage planted_message(Rng& rng, int label, std::size_t content_length = 1000) {
  const std::int32_t lo = label == 1 ? 2 : 31;
  const std::int32_t hi = label == 1 ? 31 : 60;
  models::EncodedMessage m;
  m.subject = random_ids(rng, 30, 5, lo, hi);
  m.content = random_ids(rng, content_length, 12, lo, hi);
  m.address = random_ids(rng, 1000, 14, lo, hi);
  m.name = random_ids(rng, 30, 2, lo, hi);
  m.salutation = random_ids(rng, 10, 3, lo, hi);
  return m;
}

inline models::TextCnnConfig text_config(models::ModelKind kind) {
  models::TextCnnConfig c;
  c.kind = kind;
  c.vocab_size = kTinyVocab;
  c.vocab_hash = "words-hash";
  return c;
}

inline models::SenderCnnConfig sender_config() {
  models::SenderCnnConfig c;
  c.trigram_vocab_size = kTinyVocab;
  c.trigram_vocab_hash = "trigram-hash";
  c.name_vocab_size = kTinyVocab;
  c.name_vocab_hash = "name-hash";
  return c;
}

inline models::SalutationCnnConfig salutation_config() {
  models::SalutationCnnConfig c;
  c.vocab_size = kTinyVocab;
  c.vocab_hash = "salutation-hash";
  return c;
}

inline std::unique_ptr<models::FullModel> make_full_model(std::uint64_t seed, double q = 0.99) {
  return std::make_unique<models::FullModel>(
      std::make_unique<models::TextCnn>(text_config(models::ModelKind::kContent), derive_seed(seed, "content")),
      std::make_unique<models::SenderCnn>(sender_config(), derive_seed(seed, "sender")),
      std::make_unique<models::TextCnn>(text_config(models::ModelKind::kAction), derive_seed(seed, "action")),
      std::make_unique<models::SalutationCnn>(salutation_config(), derive_seed(seed, "salutation")), q,
      derive_seed(seed, "head"));
}

inline std::vector<const models::EncodedMessage*> pointers(const std::vector<models::EncodedMessage>& v) {
  std::vector<const models::EncodedMessage*> out;
  for (const auto& m : v) out.push_back(&m);
  return out;
}

}  // namespace hmclf::testing
