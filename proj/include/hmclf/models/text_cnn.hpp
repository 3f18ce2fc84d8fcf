#pragma once

#include <array>
#include <memory>

#include "hmclf/models/classifier.hpp"
#include "hmclf/nn/activations.hpp"
#include "hmclf/nn/batch_norm.hpp"
#include "hmclf/nn/conv_block.hpp"
#include "hmclf/nn/dense.hpp"
#include "hmclf/nn/embedding.hpp"
#include "hmclf/util/random.hpp"

namespace hmclf::models {

struct TextCnnConfig {
  ModelKind kind = ModelKind::kContent;  // content or action; same structure
  std::size_t vocab_size = 0;
  std::string vocab_hash;
  std::size_t embed_dim = 64;
  nn::ConvBlockSpec conv{{1, 2, 3, 4}, 128};
  std::size_t hidden = 128;
  double dropout = 0.4;
  std::size_t subject_length = 30;
  std::size_t content_length = 1000;

  nlohmann::json to_json() const {
    return {{"kind", to_string(kind)}, {"vocab_size", vocab_size}, {"vocab_hash", vocab_hash},
            {"embed_dim", embed_dim}, {"windows", conv.window_sizes}, {"filters", conv.filters},
            {"hidden", hidden}, {"dropout", dropout}, {"subject_length", subject_length},
            {"content_length", content_length}};
  }

  static TextCnnConfig from_json(const nlohmann::json& j) {
    TextCnnConfig c;
    c.kind = model_kind_from_string(j.at("kind").get<std::string>());
    c.vocab_size = j.at("vocab_size");
    c.vocab_hash = j.at("vocab_hash");
    c.embed_dim = j.at("embed_dim");
    c.conv.window_sizes = j.at("windows").get<std::vector<std::size_t>>();
    c.conv.filters = j.at("filters");
    c.hidden = j.at("hidden");
    c.dropout = j.at("dropout");
    c.subject_length = j.at("subject_length");
    c.content_length = j.at("content_length");
    return c;
  }
};

/// Subject + content classifier shared by the content and action models:
/// shared embedding -> one conv block per input -> concat -> dropout ->
/// (FC, BN, ReLU) x 2 -> dropout -> FC 2. The second hidden activation is the
/// representation tap consumed by the fusion model.
class TextCnn : public Classifier {
 public:
  TextCnn(TextCnnConfig cfg, std::uint64_t seed)
      : cfg_(std::move(cfg)),
        embedding_(store_, "embedding", cfg_.vocab_size, cfg_.embed_dim, true),
        conv_subject_(store_, "conv_subject", cfg_.conv, cfg_.embed_dim, true),
        conv_content_(store_, "conv_content", cfg_.conv, cfg_.embed_dim, true),
        dropout_in_(cfg_.dropout),
        fc1_(store_, "fc1", 2 * cfg_.conv.output_width(), cfg_.hidden),
        bn1_(store_, "bn1", cfg_.hidden),
        fc2_(store_, "fc2", cfg_.hidden, cfg_.hidden),
        bn2_(store_, "bn2", cfg_.hidden),
        dropout_out_(cfg_.dropout),
        out_(store_, "out", cfg_.hidden, 2) {
    if (cfg_.kind != ModelKind::kContent && cfg_.kind != ModelKind::kAction) {
      throw UsageError("TextCnn serves the content and action models only");
    }
    if (cfg_.vocab_size < 2) throw UsageError("vocabulary too small");
    conv_subject_.check_length(cfg_.subject_length);
    conv_content_.check_length(cfg_.content_length);
    Rng rng(derive_seed(seed, "init"));
    embedding_.initialize(rng);
    conv_subject_.initialize(rng);
    conv_content_.initialize(rng);
    fc1_.initialize(rng);
    fc2_.initialize(rng);
    out_.initialize(rng);
    reseed_dropout(derive_seed(seed, "dropout"));
  }

  const TextCnnConfig& cfg() const noexcept { return cfg_; }
  ModelKind kind() const override { return cfg_.kind; }
  std::size_t conv_width() const { return conv_subject_.output_width(); }
  std::size_t fused_width() const { return 2 * conv_subject_.output_width(); }
  std::size_t representation_width() const { return cfg_.hidden; }

  std::vector<Param*> parameters() override { return store_.pointers(); }
  std::vector<const Param*> parameters() const override {
    std::vector<const Param*> out;
    for (const auto& p : store_) out.push_back(&p);
    return out;
  }

  nlohmann::json config() const override { return cfg_.to_json(); }
  nlohmann::json vocab_hashes() const override { return {{"words", cfg_.vocab_hash}}; }

  std::vector<std::string> layer_specs() const override {
    const nlohmann::json conv = {{"windows", cfg_.conv.window_sizes}, {"filters", cfg_.conv.filters}};
    return {
        "embedding" + nlohmann::json({{"vocab", cfg_.vocab_size}, {"dim", cfg_.embed_dim}}).dump(),
        "conv_block[subject]" + conv.dump(),
        "conv_block[content]" + conv.dump(),
        "concat" + nlohmann::json({{"width", fused_width()}}).dump(),
        "dropout" + nlohmann::json({{"rate", cfg_.dropout}}).dump(),
        dense_spec(fused_width(), cfg_.hidden),
        "batch_norm",
        "relu",
        dense_spec(cfg_.hidden, cfg_.hidden),
        "batch_norm",
        "relu",
        "dropout" + nlohmann::json({{"rate", cfg_.dropout}}).dump(),
        dense_spec(cfg_.hidden, 2),
        "softmax",
    };
  }

  void reseed_dropout(std::uint64_t seed) override {
    dropout_in_.reseed(derive_seed(seed, "in"));
    dropout_out_.reseed(derive_seed(seed, "out"));
  }

  /// Train-mode forward up to the representation tap [B, hidden].
  Tensor representation_train(MessageBatch batch) {
    subject_idx_ = gather(batch, &EncodedMessage::subject, "subject");
    content_idx_ = gather(batch, &EncodedMessage::content, "content");
    const Tensor hs = conv_subject_.forward_train(embedding_.forward(subject_idx_));
    const Tensor hc = conv_content_.forward_train(embedding_.forward(content_idx_));
    const Tensor* parts[] = {&hs, &hc};
    Tensor h = dropout_in_.forward_train(nn::concat_features<Real>(parts));
    h = relu1_.forward_train(bn1_.forward_train(fc1_.forward_train(h)));
    return relu2_.forward_train(bn2_.forward_train(fc2_.forward_train(h)));
  }

  /// Backpropagates a gradient arriving at the representation tap.
  void backward_representation(const Tensor& grad_rep) {
    Tensor g = fc2_.backward(bn2_.backward(relu2_.backward(grad_rep)));
    g = dropout_in_.backward(fc1_.backward(bn1_.backward(relu1_.backward(g))));
    const std::size_t w = conv_subject_.output_width();
    const Tensor gs = conv_subject_.backward(nn::slice_features(g, 0, w));
    embedding_.backward(subject_idx_, gs, conv_subject_.gradient_rows());
    const Tensor gc = conv_content_.backward(nn::slice_features(g, w, w));
    embedding_.backward(content_idx_, gc, conv_content_.gradient_rows());
  }

  Tensor logits_train(MessageBatch batch) override {
    return out_.forward_train(dropout_out_.forward_train(representation_train(batch)));
  }

  void backward(const Tensor& grad_logits) override {
    backward_representation(dropout_out_.backward(out_.backward(grad_logits)));
  }

  /// Infer-mode representation tap.
  Tensor representation(MessageBatch batch) const {
    const auto subject = gather(batch, &EncodedMessage::subject, "subject");
    const auto content = gather(batch, &EncodedMessage::content, "content");
    const Tensor hs = conv_subject_.forward_infer(embedding_.forward(subject));
    const Tensor hc = conv_content_.forward_infer(embedding_.forward(content));
    const Tensor* parts[] = {&hs, &hc};
    Tensor h = nn::concat_features<Real>(parts);
    h = relu1_.forward_infer(bn1_.forward_infer(fc1_.forward_infer(h)));
    return relu2_.forward_infer(bn2_.forward_infer(fc2_.forward_infer(h)));
  }

  /// Infer-mode conv outputs (subject, content) before concatenation.
  std::array<Tensor, 2> conv_features(MessageBatch batch) const {
    return {conv_subject_.forward_infer(embedding_.forward(gather(batch, &EncodedMessage::subject, "subject"))),
            conv_content_.forward_infer(embedding_.forward(gather(batch, &EncodedMessage::content, "content")))};
  }

  Tensor logits(MessageBatch batch) const override { return out_.forward_infer(representation(batch)); }

 private:

  TextCnnConfig cfg_;
  nn::ParameterStore<Real> store_;
  nn::Embedding<Real> embedding_;
  nn::TemporalConvBlock<Real> conv_subject_;
  nn::TemporalConvBlock<Real> conv_content_;
  nn::Dropout<Real> dropout_in_;
  nn::Dense<Real> fc1_;
  nn::BatchNorm<Real> bn1_;
  nn::ReLU<Real> relu1_;
  nn::Dense<Real> fc2_;
  nn::BatchNorm<Real> bn2_;
  nn::ReLU<Real> relu2_;
  nn::Dropout<Real> dropout_out_;
  nn::Dense<Real> out_;
  nn::IndexBatch subject_idx_;
  nn::IndexBatch content_idx_;
};

}  // namespace hmclf::models
