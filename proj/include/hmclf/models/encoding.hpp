#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hmclf/labels/email_record.hpp"
#include "hmclf/labels/salutation.hpp"
#include "hmclf/nn/embedding.hpp"
#include "hmclf/text/sequence_spec.hpp"
#include "hmclf/text/tokenize.hpp"
#include "hmclf/text/vocabulary.hpp"

namespace hmclf::models {

/// Every model input for one message, already mapped to indices.
struct EncodedMessage {
  std::vector<std::int32_t> subject;
  std::vector<std::int32_t> content;
  std::vector<std::int32_t> address;
  std::vector<std::int32_t> name;
  std::vector<std::int32_t> salutation;
  /// Fusion signals from frozen sub-models; empty until attached.
  std::vector<float> signals;
};

using MessageBatch = std::span<const EncodedMessage* const>;

/// The four vocabularies: words (subject/content), address trigrams,
/// sender-name words, salutation words.
struct VocabSet {
  text::Vocabulary words;
  text::Vocabulary trigrams;
  text::Vocabulary names;
  text::Vocabulary salutation;
};

enum class Phase { kTrain, kInfer };

class MessageEncoder {
 public:
  MessageEncoder(const VocabSet& vocabs, text::SequenceSpec spec) : vocabs_(&vocabs), spec_(spec) {}

  const VocabSet& vocabs() const noexcept { return *vocabs_; }
  const text::SequenceSpec& spec() const noexcept { return spec_; }

  EncodedMessage encode(const EmailRecord& r, Phase phase) const {
    EncodedMessage m;
    m.subject = text::encode(text::tokenize_words(r.subject), vocabs_->words, spec_.subject);
    m.content = text::encode(text::tokenize_words(r.body), vocabs_->words,
                             phase == Phase::kTrain ? spec_.content_train : spec_.content_infer);
    m.address = text::encode(text::letter_trigrams(r.sender_address, spec_.address), vocabs_->trigrams,
                             spec_.address);
    m.name = text::encode(text::tokenize_words(r.sender_name), vocabs_->names, spec_.name);
    m.salutation = labels::salutation_input(r.body, vocabs_->salutation, spec_.salutation);
    return m;
  }

  std::vector<EncodedMessage> encode_all(std::span<const EmailRecord> records, Phase phase) const {
    std::vector<EncodedMessage> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(encode(r, phase));
    return out;
  }

 private:
  const VocabSet* vocabs_;
  text::SequenceSpec spec_;
};

/// Stacks one field of every message into a [B, s] index block.
template <typename Field>
nn::IndexBatch gather(MessageBatch batch, Field field, const char* what) {
  nn::IndexBatch out;
  out.batch = batch.size();
  if (batch.empty()) throw UsageError("empty batch");
  out.length = (batch.front()->*field).size();
  if (out.length == 0) throw UsageError(std::string("message has an empty ") + what + " input");
  out.ids.reserve(out.batch * out.length);
  for (const auto* m : batch) {
    const auto& v = m->*field;
    if (v.size() != out.length) throw UsageError(std::string("ragged ") + what + " lengths within a batch");
    out.ids.insert(out.ids.end(), v.begin(), v.end());
  }
  return out;
}

}  // namespace hmclf::models
