#pragma once

#include <memory>

#include "hmclf/models/rectify.hpp"
#include "hmclf/models/salutation_cnn.hpp"
#include "hmclf/models/sender_cnn.hpp"
#include "hmclf/models/text_cnn.hpp"
#include "hmclf/util/sha256.hpp"

namespace hmclf::models {

/// Fusion model: the trainable content representation concatenated with
/// frozen sub-model signals [p+_sender, p-_sender, p-_action, salutation
/// representation], then one FC 2 head.
class FullModel : public Classifier {
 public:
  static constexpr std::size_t kScoreSignals = 3;

  FullModel(std::unique_ptr<TextCnn> content, std::unique_ptr<SenderCnn> sender, std::unique_ptr<TextCnn> action,
            std::unique_ptr<SalutationCnn> salutation, double q, std::uint64_t seed)
      : content_(require(std::move(content), "content")),
        sender_(require(std::move(sender), "sender")),
        action_(require(std::move(action), "action")),
        salutation_(require(std::move(salutation), "salutation")),
        q_(q),
        head_(store_, "out", fused_width(), 2) {
    if (content_->kind() != ModelKind::kContent) throw DataError("content slot holds a " + std::string(to_string(content_->kind())) + " model");
    if (action_->kind() != ModelKind::kAction) throw DataError("action slot holds a " + std::string(to_string(action_->kind())) + " model");
    if (!(q_ >= 0.0 && q_ <= 1.0)) throw UsageError("rectification threshold outside [0, 1]");
    for (Classifier* m : frozen_models()) {
      auto params = m->parameters();
      nn::set_trainable<Real>(params, false);
    }
    verify_frozen();
    Rng rng(derive_seed(seed, "init"));
    head_.initialize(rng);
  }

  ModelKind kind() const override { return ModelKind::kFull; }
  double q() const noexcept { return q_; }
  std::size_t signal_width() const { return kScoreSignals + salutation_->representation_width(); }
  std::size_t fused_width() const { return content_->representation_width() + signal_width(); }

  TextCnn& content() noexcept { return *content_; }
  const TextCnn& content() const noexcept { return *content_; }
  const SenderCnn& sender() const noexcept { return *sender_; }
  const TextCnn& action() const noexcept { return *action_; }
  const SalutationCnn& salutation() const noexcept { return *salutation_; }

  /// Sub-model checkpoint hashes recorded when the model was assembled from files.
  const nlohmann::json& manifest() const noexcept { return manifest_; }
  void set_manifest(nlohmann::json m) { manifest_ = std::move(m); }

  /// Throws if any sender, action or salutation parameter is trainable.
  void verify_frozen() const {
    for (const Classifier* m : frozen_models()) {
      for (const auto* p : m->parameters()) {
        if (p->trainable) {
          throw UsageError(std::string("unfrozen ") + to_string(m->kind()) + " parameter: " + p->name);
        }
      }
    }
  }

  /// SHA-256 over the names and bytes of every frozen parameter.
  std::string frozen_hash() const {
    Sha256 h;
    for (const Classifier* m : frozen_models()) {
      for (const auto* p : m->parameters()) {
        h.update(std::string(to_string(m->kind())) + "/" + p->name);
        const auto data = p->tensor.data();
        h.update(std::string_view(reinterpret_cast<const char*>(data.data()), data.size_bytes()));
      }
    }
    return h.hex();
  }

  /// Frozen sub-model signals, [B, signal_width()].
  Tensor signals(MessageBatch batch) const {
    const auto p_sender = sender_->predict(batch);
    const auto p_action = action_->predict(batch);
    const Tensor rep = salutation_->representation(batch);
    const std::size_t width = signal_width();
    Tensor out({batch.size(), width});
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const auto s = rectify(p_sender[b], q_);
      const auto a = rectify(p_action[b], q_);
      Real* row = out.data().data() + b * width;
      row[0] = static_cast<Real>(s.p_plus);
      row[1] = static_cast<Real>(s.p_minus);
      row[2] = static_cast<Real>(a.p_minus);
      const auto r = rep.row(b);
      std::copy(r.begin(), r.end(), row + kScoreSignals);
    }
    return out;
  }

  /// Precomputes and stores the frozen signals on each message.
  void attach_signals(std::span<EncodedMessage> messages, std::size_t batch_size = 256) const {
    const std::size_t width = signal_width();
    for (std::size_t begin = 0; begin < messages.size(); begin += batch_size) {
      const std::size_t end = std::min(messages.size(), begin + batch_size);
      std::vector<const EncodedMessage*> ptrs;
      for (std::size_t i = begin; i < end; ++i) ptrs.push_back(&messages[i]);
      const Tensor s = signals(ptrs);
      for (std::size_t i = begin; i < end; ++i) {
        const auto r = s.row(i - begin);
        messages[i].signals.assign(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(width));
      }
    }
  }

  std::vector<Param*> parameters() override {
    std::vector<Param*> out;
    for (Classifier* m : all_models()) {
      auto ps = m->parameters();
      out.insert(out.end(), ps.begin(), ps.end());
    }
    auto head = store_.pointers();
    out.insert(out.end(), head.begin(), head.end());
    return out;
  }

  std::vector<const Param*> parameters() const override {
    std::vector<const Param*> out;
    for (const Classifier* m : all_models()) {
      auto ps = m->parameters();
      out.insert(out.end(), ps.begin(), ps.end());
    }
    for (const auto& p : store_) out.push_back(&p);
    return out;
  }

  std::vector<std::string> parameter_names() const override {
    std::vector<std::string> out;
    for (const Classifier* m : all_models()) {
      for (const auto* p : m->parameters()) out.push_back(std::string(to_string(m->kind())) + "/" + p->name);
    }
    for (const auto& p : store_) out.push_back("head/" + p.name);
    return out;
  }

  nlohmann::json config() const override {
    return {{"q", q_},
            {"content_tap", "post-relu fc2"},
            {"salutation_tap", "post-relu fc1"},
            {"content", content_->config()},
            {"sender", sender_->config()},
            {"action", action_->config()},
            {"salutation", salutation_->config()}};
  }

  nlohmann::json vocab_hashes() const override {
    nlohmann::json out = nlohmann::json::object();
    for (const Classifier* m : all_models()) out.update(m->vocab_hashes());
    return out;
  }

  std::vector<std::string> layer_specs() const override {
    std::vector<std::string> out;
    for (const Classifier* m : all_models()) {
      for (const auto& s : m->layer_specs()) out.push_back(std::string(to_string(m->kind())) + ":" + s);
    }
    out.push_back("concat" + nlohmann::json({{"width", fused_width()}}).dump());
    out.push_back(dense_spec(fused_width(), 2));
    out.push_back("softmax");
    return out;
  }

  void reseed_dropout(std::uint64_t seed) override { content_->reseed_dropout(seed); }
  double penalty() const override { return content_->penalty(); }
  void add_penalty_grads() override { content_->add_penalty_grads(); }

  Tensor logits_train(MessageBatch batch) override {
    const Tensor rep = content_->representation_train(batch);
    const Tensor sig = stacked_signals(batch);
    const Tensor* parts[] = {&rep, &sig};
    return head_.forward_train(nn::concat_features<Real>(parts));
  }

  void backward(const Tensor& grad_logits) override {
    const Tensor g = head_.backward(grad_logits);
    content_->backward_representation(nn::slice_features(g, 0, content_->representation_width()));
  }

  Tensor logits(MessageBatch batch) const override {
    const Tensor rep = content_->representation(batch);
    const Tensor sig = stacked_signals(batch);
    const Tensor* parts[] = {&rep, &sig};
    return head_.forward_infer(nn::concat_features<Real>(parts));
  }

 private:
  template <typename M>
  static std::unique_ptr<M> require(std::unique_ptr<M> m, const char* what) {
    if (!m) throw DataError(std::string("full model requires a ") + what + " sub-model");
    return m;
  }

  std::array<Classifier*, 3> frozen_models() { return {sender_.get(), action_.get(), salutation_.get()}; }
  std::array<const Classifier*, 3> frozen_models() const { return {sender_.get(), action_.get(), salutation_.get()}; }
  std::array<Classifier*, 4> all_models() { return {content_.get(), sender_.get(), action_.get(), salutation_.get()}; }
  std::array<const Classifier*, 4> all_models() const {
    return {content_.get(), sender_.get(), action_.get(), salutation_.get()};
  }

  /// Attached signals when every message carries them, otherwise computed.
  Tensor stacked_signals(MessageBatch batch) const {
    const std::size_t width = signal_width();
    bool attached = true;
    for (const auto* m : batch) {
      if (m->signals.empty()) {
        attached = false;
      } else if (m->signals.size() != width) {
        throw DataError("attached signal width " + std::to_string(m->signals.size()) + ", expected " +
                        std::to_string(width));
      }
    }
    if (!attached) return signals(batch);
    Tensor out({batch.size(), width});
    for (std::size_t b = 0; b < batch.size(); ++b) {
      std::copy(batch[b]->signals.begin(), batch[b]->signals.end(), out.data().begin() + b * width);
    }
    return out;
  }

  std::unique_ptr<TextCnn> content_;
  std::unique_ptr<SenderCnn> sender_;
  std::unique_ptr<TextCnn> action_;
  std::unique_ptr<SalutationCnn> salutation_;
  double q_;
  nn::ParameterStore<Real> store_;
  nn::Dense<Real> head_;
  nlohmann::json manifest_ = nlohmann::json::object();
};

}  // namespace hmclf::models
