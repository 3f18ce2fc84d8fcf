#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "hmclf/models/classifier.hpp"
#include "hmclf/nn/adam.hpp"
#include "hmclf/util/random.hpp"

namespace hmclf::models {

/// Encoded inputs paired with binary labels (1 = human / positive).
struct LabeledSet {
  std::vector<const EncodedMessage*> inputs;
  std::vector<int> labels;

  std::size_t size() const noexcept { return inputs.size(); }
  void add(const EncodedMessage& m, int label) {
    inputs.push_back(&m);
    labels.push_back(label);
  }
};

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;  ///< mean CE + penalty over the epoch's steps
  std::optional<double> val_loss;
};

struct TrainOptions {
  std::size_t epochs = 5;
  std::size_t batch_size = 128;
  nn::AdamConfig adam;
  std::uint64_t seed = 0;
  /// Stop after this many optimizer steps; 0 means no limit.
  std::size_t max_steps = 0;
  /// Restore the epoch with the lowest validation loss at the end.
  bool keep_best = true;
  std::function<void(const EpochLog&)> on_epoch;
};

struct TrainReport {
  std::vector<EpochLog> epochs;
  std::size_t steps = 0;
  std::optional<std::size_t> best_epoch;
};

/// Mean cross-entropy in inference mode.
inline double evaluate_loss(const Classifier& model, const LabeledSet& set, std::size_t batch_size = 256) {
  if (set.size() == 0) throw UsageError("evaluate_loss on an empty set");
  double total = 0.0;
  for (std::size_t begin = 0; begin < set.size(); begin += batch_size) {
    const std::size_t end = std::min(set.size(), begin + batch_size);
    const MessageBatch batch(set.inputs.data() + begin, end - begin);
    const auto ce = nn::softmax_cross_entropy(model.logits(batch),
                                              std::span<const int>(set.labels.data() + begin, end - begin));
    total += ce.loss * static_cast<double>(end - begin);
  }
  return total / static_cast<double>(set.size());
}

namespace detail {

inline std::vector<std::vector<Real>> snapshot(const std::vector<Param*>& params) {
  std::vector<std::vector<Real>> out;
  for (const auto* p : params) out.emplace_back(p->tensor.data().begin(), p->tensor.data().end());
  return out;
}

inline void restore(const std::vector<Param*>& params, const std::vector<std::vector<Real>>& saved) {
  for (std::size_t i = 0; i < params.size(); ++i) std::copy(saved[i].begin(), saved[i].end(), params[i]->tensor.data().begin());
}

}  // namespace detail

/// Minibatch Adam over shuffled epochs. A trailing batch of one example is
/// dropped because batch norm cannot train on it. On a non-finite loss or
/// gradient the step is rolled back (including batch-norm running moments)
/// and DivergenceError propagates, leaving the model at its last finite state.
inline TrainReport train(Classifier& model, const LabeledSet& train_set, const LabeledSet* val_set,
                         const TrainOptions& opt) {
  if (train_set.size() < 2) throw DataError("training set needs at least two examples");
  if (train_set.labels.size() != train_set.inputs.size()) throw UsageError("label count mismatch");
  if (opt.batch_size < 2) throw UsageError("batch size must be at least 2");
  const auto params = model.parameters();
  model.reseed_dropout(derive_seed(opt.seed, "dropout"));
  Rng rng(derive_seed(opt.seed, "shuffle"));

  std::vector<std::size_t> order(train_set.size());
  std::vector<const EncodedMessage*> batch;
  std::vector<int> labels;
  TrainReport report;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<std::vector<Real>> best;

  for (std::size_t epoch = 1; epoch <= opt.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t loss_steps = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += opt.batch_size) {
      const std::size_t end = std::min(order.size(), begin + opt.batch_size);
      if (end - begin < 2) break;
      batch.clear();
      labels.clear();
      for (std::size_t i = begin; i < end; ++i) {
        batch.push_back(train_set.inputs[order[i]]);
        labels.push_back(train_set.labels[order[i]]);
      }
      const auto before = detail::snapshot(params);
      double loss = 0.0;
      try {
        nn::zero_grads<Real>(params);
        const auto ce = nn::softmax_cross_entropy(model.logits_train(batch), labels);
        loss = ce.loss + model.penalty();
        if (!std::isfinite(loss)) {
          throw DivergenceError("non-finite training loss at step " + std::to_string(report.steps + 1));
        }
        model.backward(ce.grad_logits);
        model.add_penalty_grads();
        for (const auto* p : params) {
          if (!p->trainable) continue;
          for (Real g : p->tensor.grad()) {
            if (!std::isfinite(g)) throw DivergenceError("non-finite gradient in " + p->name);
          }
        }
      } catch (const DivergenceError&) {
        detail::restore(params, before);
        throw;
      }
      nn::adam_step<Real>(params, opt.adam);
      loss_sum += loss;
      ++loss_steps;
      ++report.steps;
      if (opt.max_steps != 0 && report.steps >= opt.max_steps) break;
    }
    EpochLog log;
    log.epoch = epoch;
    log.train_loss = loss_steps ? loss_sum / static_cast<double>(loss_steps) : 0.0;
    if (val_set != nullptr && val_set->size() > 0) {
      log.val_loss = evaluate_loss(model, *val_set);
      if (!std::isfinite(*log.val_loss)) throw DivergenceError("non-finite validation loss");
      if (*log.val_loss < best_val) {
        best_val = *log.val_loss;
        report.best_epoch = epoch;
        if (opt.keep_best) best = detail::snapshot(params);
      }
    }
    report.epochs.push_back(log);
    if (opt.on_epoch) opt.on_epoch(log);
    if (opt.max_steps != 0 && report.steps >= opt.max_steps) break;
  }
  if (opt.keep_best && !best.empty()) detail::restore(params, best);
  return report;
}

}  // namespace hmclf::models
