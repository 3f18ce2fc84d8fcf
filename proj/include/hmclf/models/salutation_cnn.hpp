#pragma once

#include "hmclf/models/classifier.hpp"
#include "hmclf/nn/activations.hpp"
#include "hmclf/nn/conv_block.hpp"
#include "hmclf/nn/dense.hpp"
#include "hmclf/nn/embedding.hpp"
#include "hmclf/util/random.hpp"

namespace hmclf::models {

struct SalutationCnnConfig {
  std::size_t vocab_size = 0;
  std::string vocab_hash;
  std::size_t embed_dim = 128;
  nn::ConvBlockSpec conv{{1, 2, 3}, 128};
  double dropout = 0.6;
  std::size_t hidden = 64;
  std::size_t length = 10;

  nlohmann::json to_json() const {
    return {{"vocab_size", vocab_size}, {"vocab_hash", vocab_hash}, {"embed_dim", embed_dim},
            {"windows", conv.window_sizes}, {"filters", conv.filters}, {"dropout", dropout},
            {"hidden", hidden}, {"length", length}};
  }

  static SalutationCnnConfig from_json(const nlohmann::json& j) {
    SalutationCnnConfig c;
    c.vocab_size = j.at("vocab_size");
    c.vocab_hash = j.at("vocab_hash");
    c.embed_dim = j.at("embed_dim");
    c.conv.window_sizes = j.at("windows").get<std::vector<std::size_t>>();
    c.conv.filters = j.at("filters");
    c.dropout = j.at("dropout");
    c.hidden = j.at("hidden");
    c.length = j.at("length");
    return c;
  }
};

/// Beginning-of-body words -> embedding -> conv block -> dropout -> FC 64 ->
/// ReLU (representation tap) -> FC 2.
class SalutationCnn : public Classifier {
 public:
  SalutationCnn(SalutationCnnConfig cfg, std::uint64_t seed)
      : cfg_(std::move(cfg)),
        embedding_(store_, "embedding", cfg_.vocab_size, cfg_.embed_dim, true),
        conv_(store_, "conv", cfg_.conv, cfg_.embed_dim, true),
        dropout_(cfg_.dropout),
        fc1_(store_, "fc1", cfg_.conv.output_width(), cfg_.hidden),
        out_(store_, "out", cfg_.hidden, 2) {
    conv_.check_length(cfg_.length);
    Rng rng(derive_seed(seed, "init"));
    embedding_.initialize(rng);
    conv_.initialize(rng);
    fc1_.initialize(rng);
    out_.initialize(rng);
    reseed_dropout(derive_seed(seed, "dropout"));
  }

  const SalutationCnnConfig& cfg() const noexcept { return cfg_; }
  ModelKind kind() const override { return ModelKind::kSalutation; }
  std::size_t representation_width() const { return cfg_.hidden; }

  std::vector<Param*> parameters() override { return store_.pointers(); }
  std::vector<const Param*> parameters() const override {
    std::vector<const Param*> out;
    for (const auto& p : store_) out.push_back(&p);
    return out;
  }
  nlohmann::json config() const override { return cfg_.to_json(); }
  nlohmann::json vocab_hashes() const override { return {{"salutation", cfg_.vocab_hash}}; }

  std::vector<std::string> layer_specs() const override {
    return {
        "embedding" + nlohmann::json({{"vocab", cfg_.vocab_size}, {"dim", cfg_.embed_dim}}).dump(),
        "conv_block" + nlohmann::json({{"windows", cfg_.conv.window_sizes}, {"filters", cfg_.conv.filters}}).dump(),
        "dropout" + nlohmann::json({{"rate", cfg_.dropout}}).dump(),
        dense_spec(cfg_.conv.output_width(), cfg_.hidden),
        "relu",
        dense_spec(cfg_.hidden, 2),
        "softmax",
    };
  }

  void reseed_dropout(std::uint64_t seed) override { dropout_.reseed(seed); }

  Tensor logits_train(MessageBatch batch) override {
    idx_ = gather(batch, &EncodedMessage::salutation, "salutation");
    const Tensor h = dropout_.forward_train(conv_.forward_train(embedding_.forward(idx_)));
    return out_.forward_train(relu_.forward_train(fc1_.forward_train(h)));
  }

  void backward(const Tensor& grad_logits) override {
    const Tensor g = dropout_.backward(fc1_.backward(relu_.backward(out_.backward(grad_logits))));
    embedding_.backward(idx_, conv_.backward(g), conv_.gradient_rows());
  }

  /// Infer-mode 64-unit representation (post-ReLU of the FC-64 layer).
  Tensor representation(MessageBatch batch) const {
    const auto idx = gather(batch, &EncodedMessage::salutation, "salutation");
    return relu_.forward_infer(fc1_.forward_infer(conv_.forward_infer(embedding_.forward(idx))));
  }

  Tensor logits(MessageBatch batch) const override { return out_.forward_infer(representation(batch)); }

 private:
  SalutationCnnConfig cfg_;
  nn::ParameterStore<Real> store_;
  nn::Embedding<Real> embedding_;
  nn::TemporalConvBlock<Real> conv_;
  nn::Dropout<Real> dropout_;
  nn::Dense<Real> fc1_;
  nn::ReLU<Real> relu_;
  nn::Dense<Real> out_;
  nn::IndexBatch idx_;
};

}  // namespace hmclf::models
