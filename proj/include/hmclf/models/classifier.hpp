#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hmclf/models/encoding.hpp"
#include "hmclf/nn/loss.hpp"
#include "hmclf/nn/parameter.hpp"

namespace hmclf::models {

using Real = float;
using Tensor = nn::Tensor<Real>;
using Param = nn::Parameter<Real>;

enum class ModelKind { kContent, kSender, kAction, kSalutation, kFull };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::kContent: return "content";
    case ModelKind::kSender: return "sender";
    case ModelKind::kAction: return "action";
    case ModelKind::kSalutation: return "salutation";
    case ModelKind::kFull: return "full";
  }
  return "?";
}

inline ModelKind model_kind_from_string(const std::string& s) {
  if (s == "content") return ModelKind::kContent;
  if (s == "sender") return ModelKind::kSender;
  if (s == "action") return ModelKind::kAction;
  if (s == "salutation") return ModelKind::kSalutation;
  if (s == "full") return ModelKind::kFull;
  throw DataError("unknown model kind: " + s);
}

/// A two-class message classifier built from the nn layers. Train-mode calls
/// mutate layer caches and are single-writer; `logits` and `predict` are const
/// and allocate their scratch per call, so a trained model may serve many
/// threads at once.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual ModelKind kind() const = 0;
  /// Every parameter and batch-norm buffer, in declaration order.
  virtual std::vector<Param*> parameters() = 0;
  virtual std::vector<const Param*> parameters() const = 0;
  virtual Tensor logits_train(MessageBatch batch) = 0;
  virtual void backward(const Tensor& grad_logits) = 0;
  virtual Tensor logits(MessageBatch batch) const = 0;
  virtual std::vector<std::string> layer_specs() const = 0;
  virtual nlohmann::json config() const = 0;
  /// Per-input vocabulary hashes recorded at build time.
  virtual nlohmann::json vocab_hashes() const = 0;
  virtual void reseed_dropout(std::uint64_t seed) = 0;
  virtual double penalty() const { return 0.0; }
  /// Checkpoint names, index-aligned with parameters().
  virtual std::vector<std::string> parameter_names() const {
    std::vector<std::string> out;
    for (const auto* p : parameters()) out.push_back(p->name);
    return out;
  }
  virtual void add_penalty_grads() {}

  /// Probability of the human class (column 1) per message.
  std::vector<double> predict(MessageBatch batch) const {
    const auto p = nn::softmax(logits(batch));
    std::vector<double> out(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) out[b] = p[b * 2 + 1];
    return out;
  }

  /// Throws unless every recorded vocabulary hash matches `vocabs`.
  void check_vocabularies(const VocabSet& vocabs) const {
    const auto expected = vocab_hashes();
    auto check = [&](const char* key, const text::Vocabulary& v) {
      if (!expected.contains(key)) return;
      if (expected.at(key).get<std::string>() != v.hash()) {
        throw DataError(std::string("vocabulary hash mismatch for '") + key + "' in " + to_string(kind()) +
                        " model");
      }
    };
    check("words", vocabs.words);
    check("trigrams", vocabs.trigrams);
    check("names", vocabs.names);
    check("salutation", vocabs.salutation);
  }
};

inline std::string dense_spec(std::size_t in, std::size_t out, double l1 = 0.0, double l2 = 0.0) {
  nlohmann::json j = {{"in", in}, {"out", out}, {"l1", l1}, {"l2", l2}};
  return "dense" + j.dump();
}

}  // namespace hmclf::models
