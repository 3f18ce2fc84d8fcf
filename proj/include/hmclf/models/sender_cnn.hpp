#pragma once

#include "hmclf/models/classifier.hpp"
#include "hmclf/nn/activations.hpp"
#include "hmclf/nn/conv_block.hpp"
#include "hmclf/nn/dense.hpp"
#include "hmclf/nn/embedding.hpp"
#include "hmclf/util/random.hpp"

namespace hmclf::models {

struct SenderCnnConfig {
  std::size_t trigram_vocab_size = 0;
  std::string trigram_vocab_hash;
  std::size_t name_vocab_size = 0;
  std::string name_vocab_hash;
  std::size_t embed_dim = 64;
  nn::ConvBlockSpec conv{{1, 2, 3}, 128};
  double dropout = 0.6;
  std::size_t hidden = 64;
  double hidden_l2 = 0.001;
  double out_l1 = 0.0001;
  double out_l2 = 0.0001;
  std::size_t address_length = 1000;
  std::size_t name_length = 30;

  nlohmann::json to_json() const {
    return {{"trigram_vocab_size", trigram_vocab_size}, {"trigram_vocab_hash", trigram_vocab_hash},
            {"name_vocab_size", name_vocab_size}, {"name_vocab_hash", name_vocab_hash},
            {"embed_dim", embed_dim}, {"windows", conv.window_sizes}, {"filters", conv.filters},
            {"dropout", dropout}, {"hidden", hidden}, {"hidden_l2", hidden_l2}, {"out_l1", out_l1},
            {"out_l2", out_l2}, {"address_length", address_length}, {"name_length", name_length}};
  }

  static SenderCnnConfig from_json(const nlohmann::json& j) {
    SenderCnnConfig c;
    c.trigram_vocab_size = j.at("trigram_vocab_size");
    c.trigram_vocab_hash = j.at("trigram_vocab_hash");
    c.name_vocab_size = j.at("name_vocab_size");
    c.name_vocab_hash = j.at("name_vocab_hash");
    c.embed_dim = j.at("embed_dim");
    c.conv.window_sizes = j.at("windows").get<std::vector<std::size_t>>();
    c.conv.filters = j.at("filters");
    c.dropout = j.at("dropout");
    c.hidden = j.at("hidden");
    c.hidden_l2 = j.at("hidden_l2");
    c.out_l1 = j.at("out_l1");
    c.out_l2 = j.at("out_l2");
    c.address_length = j.at("address_length");
    c.name_length = j.at("name_length");
    return c;
  }
};

/// Sender address (letter trigrams) and sender name (words), each through its
/// own embedding, conv block and dropout; concatenated; FC 64 (L2) -> ReLU ->
/// FC 2 (L1 + L2).
class SenderCnn : public Classifier {
 public:
  SenderCnn(SenderCnnConfig cfg, std::uint64_t seed)
      : cfg_(std::move(cfg)),
        emb_address_(store_, "embedding_address", cfg_.trigram_vocab_size, cfg_.embed_dim, true),
        emb_name_(store_, "embedding_name", cfg_.name_vocab_size, cfg_.embed_dim, true),
        conv_address_(store_, "conv_address", cfg_.conv, cfg_.embed_dim, true),
        conv_name_(store_, "conv_name", cfg_.conv, cfg_.embed_dim, true),
        drop_address_(cfg_.dropout),
        drop_name_(cfg_.dropout),
        fc1_(store_, "fc1", 2 * cfg_.conv.output_width(), cfg_.hidden, 0.0, cfg_.hidden_l2),
        out_(store_, "out", cfg_.hidden, 2, cfg_.out_l1, cfg_.out_l2) {
    conv_address_.check_length(cfg_.address_length);
    conv_name_.check_length(cfg_.name_length);
    Rng rng(derive_seed(seed, "init"));
    emb_address_.initialize(rng);
    emb_name_.initialize(rng);
    conv_address_.initialize(rng);
    conv_name_.initialize(rng);
    fc1_.initialize(rng);
    out_.initialize(rng);
    reseed_dropout(derive_seed(seed, "dropout"));
  }

  const SenderCnnConfig& cfg() const noexcept { return cfg_; }
  ModelKind kind() const override { return ModelKind::kSender; }
  std::size_t branch_width() const { return conv_address_.output_width(); }
  std::size_t fused_width() const { return 2 * branch_width(); }

  std::vector<Param*> parameters() override { return store_.pointers(); }
  std::vector<const Param*> parameters() const override {
    std::vector<const Param*> out;
    for (const auto& p : store_) out.push_back(&p);
    return out;
  }
  nlohmann::json config() const override { return cfg_.to_json(); }
  nlohmann::json vocab_hashes() const override {
    return {{"trigrams", cfg_.trigram_vocab_hash}, {"names", cfg_.name_vocab_hash}};
  }

  std::vector<std::string> layer_specs() const override {
    const nlohmann::json conv = {{"windows", cfg_.conv.window_sizes}, {"filters", cfg_.conv.filters}};
    const std::string drop = "dropout" + nlohmann::json({{"rate", cfg_.dropout}}).dump();
    return {
        "embedding[address]" + nlohmann::json({{"vocab", cfg_.trigram_vocab_size}, {"dim", cfg_.embed_dim}}).dump(),
        "embedding[name]" + nlohmann::json({{"vocab", cfg_.name_vocab_size}, {"dim", cfg_.embed_dim}}).dump(),
        "conv_block[address]" + conv.dump(),
        "conv_block[name]" + conv.dump(),
        drop + "[address]",
        drop + "[name]",
        "concat" + nlohmann::json({{"width", fused_width()}}).dump(),
        dense_spec(fused_width(), cfg_.hidden, 0.0, cfg_.hidden_l2),
        "relu",
        dense_spec(cfg_.hidden, 2, cfg_.out_l1, cfg_.out_l2),
        "softmax",
    };
  }

  void reseed_dropout(std::uint64_t seed) override {
    drop_address_.reseed(derive_seed(seed, "address"));
    drop_name_.reseed(derive_seed(seed, "name"));
  }

  double penalty() const override { return fc1_.penalty() + out_.penalty(); }
  void add_penalty_grads() override {
    fc1_.add_penalty_grad();
    out_.add_penalty_grad();
  }

  Tensor logits_train(MessageBatch batch) override {
    address_idx_ = gather(batch, &EncodedMessage::address, "address");
    name_idx_ = gather(batch, &EncodedMessage::name, "name");
    const Tensor ha = drop_address_.forward_train(conv_address_.forward_train(emb_address_.forward(address_idx_)));
    const Tensor hn = drop_name_.forward_train(conv_name_.forward_train(emb_name_.forward(name_idx_)));
    const Tensor* parts[] = {&ha, &hn};
    const Tensor h = relu_.forward_train(fc1_.forward_train(nn::concat_features<Real>(parts)));
    return out_.forward_train(h);
  }

  void backward(const Tensor& grad_logits) override {
    const Tensor g = fc1_.backward(relu_.backward(out_.backward(grad_logits)));
    const std::size_t w = branch_width();
    const Tensor ga = conv_address_.backward(drop_address_.backward(nn::slice_features(g, 0, w)));
    emb_address_.backward(address_idx_, ga, conv_address_.gradient_rows());
    const Tensor gn = conv_name_.backward(drop_name_.backward(nn::slice_features(g, w, w)));
    emb_name_.backward(name_idx_, gn, conv_name_.gradient_rows());
  }

  /// Infer-mode branch outputs (address, name), each [B, windows * filters].
  std::array<Tensor, 2> branch_features(MessageBatch batch) const {
    return {conv_address_.forward_infer(emb_address_.forward(gather(batch, &EncodedMessage::address, "address"))),
            conv_name_.forward_infer(emb_name_.forward(gather(batch, &EncodedMessage::name, "name")))};
  }

  Tensor logits(MessageBatch batch) const override {
    const auto branches = branch_features(batch);
    const Tensor* parts[] = {&branches[0], &branches[1]};
    return out_.forward_infer(relu_.forward_infer(fc1_.forward_infer(nn::concat_features<Real>(parts))));
  }

 private:
  SenderCnnConfig cfg_;
  nn::ParameterStore<Real> store_;
  nn::Embedding<Real> emb_address_;
  nn::Embedding<Real> emb_name_;
  nn::TemporalConvBlock<Real> conv_address_;
  nn::TemporalConvBlock<Real> conv_name_;
  nn::Dropout<Real> drop_address_;
  nn::Dropout<Real> drop_name_;
  nn::Dense<Real> fc1_;
  nn::ReLU<Real> relu_;
  nn::Dense<Real> out_;
  nn::IndexBatch address_idx_;
  nn::IndexBatch name_idx_;
};

}  // namespace hmclf::models
