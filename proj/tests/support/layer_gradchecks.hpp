#pragma once

// Finite-difference gradient checks for every nn layer: seeded random cases,
// central differences with h = 1e-4 in double precision. Each function
// returns the worst relative error over its cases.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hmclf/nn/activations.hpp"
#include "hmclf/nn/batch_norm.hpp"
#include "hmclf/nn/conv_block.hpp"
#include "hmclf/nn/dense.hpp"
#include "hmclf/nn/embedding.hpp"
#include "hmclf/nn/loss.hpp"
#include "support/gradcheck.hpp"

namespace hmclf::testing {

using namespace hmclf::nn;

inline constexpr int kTrials = 100;
inline constexpr double kTolerance = 1e-3;

namespace detail {

inline Tensor<double> random_tensor(Shape shape, Rng& rng, double scale = 1.0) {
  Tensor<double> t(std::move(shape));
  for (double& v : t.data()) v = (2.0 * uniform01(rng) - 1.0) * scale;
  return t;
}

inline double dot(const Tensor<double>& a, const Tensor<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline std::vector<double> grad_copy(Parameter<double>& p) {
  auto g = p.tensor.grad();
  return {g.begin(), g.end()};
}

}  // namespace detail

inline double gradcheck_embedding(int trials = kTrials) {
  using namespace detail;
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(1000 + trial);
    ParameterStore<double> store;
    const std::size_t vocab = 6, dim = 3;
    Embedding<double> emb(store, "emb", vocab, dim, false);
    emb.initialize(rng);
    IndexBatch idx{2, 4, {}};
    for (int i = 0; i < 8; ++i) idx.ids.push_back(static_cast<std::int32_t>(uniform_index(rng, vocab)));
    const auto proj = random_tensor({2, 4, dim}, rng);
    emb.table().tensor.ensure_grad();
    emb.table().tensor.zero_grad();
    emb.backward(idx, proj);
    const auto analytic = grad_copy(emb.table());
    auto r = check_gradient(emb.table().tensor.data(), analytic, [&] { return dot(emb.forward(idx), proj); });
    worst = std::max(worst, r.max_relative_error);
  }
  return worst;
}

inline double gradcheck_dense(int trials = kTrials) {
  using namespace detail;
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(2000 + trial);
    ParameterStore<double> store;
    Dense<double> fc(store, "fc", 4, 3, 0.01, 0.02);
    fc.initialize(rng);
    auto x = random_tensor({3, 4}, rng);
    const auto proj = random_tensor({3, 3}, rng);
    auto loss = [&] { return dot(fc.forward_infer(x), proj) + fc.penalty(); };
    fc.weight().tensor.ensure_grad();
    fc.bias().tensor.ensure_grad();
    fc.forward_train(x);
    auto dx = fc.backward(proj);
    fc.add_penalty_grad();
    worst = std::max(worst, check_gradient(x.data(), std::vector<double>(dx.data().begin(), dx.data().end()), loss)
                                .max_relative_error);
    worst = std::max(worst, check_gradient(fc.weight().tensor.data(), grad_copy(fc.weight()), loss).max_relative_error);
    worst = std::max(worst, check_gradient(fc.bias().tensor.data(), grad_copy(fc.bias()), loss).max_relative_error);
  }
  return worst;
}

inline double gradcheck_batch_norm_train_mode(int trials = kTrials) {
  using namespace detail;
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(3000 + trial);
    ParameterStore<double> store;
    BatchNorm<double> bn(store, "bn", 3);
    for (double& v : bn.gamma().tensor.data()) v = 0.5 + uniform01(rng);
    for (double& v : bn.beta().tensor.data()) v = uniform01(rng) - 0.5;
    auto x = random_tensor({5, 3}, rng);
    const auto proj = random_tensor({5, 3}, rng);
    auto loss = [&] { return dot(bn.forward_train(x), proj); };
    bn.forward_train(x);
    auto dx = bn.backward(proj);
    worst = std::max(worst, check_gradient(x.data(), std::vector<double>(dx.data().begin(), dx.data().end()), loss)
                                .max_relative_error);
    worst = std::max(worst, check_gradient(bn.gamma().tensor.data(), grad_copy(bn.gamma()), loss).max_relative_error);
    worst = std::max(worst, check_gradient(bn.beta().tensor.data(), grad_copy(bn.beta()), loss).max_relative_error);
  }
  return worst;
}

inline double gradcheck_relu(int trials = kTrials) {
  using namespace detail;
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(4000 + trial);
    auto x = random_tensor({4, 5}, rng);
    for (double& v : x.data()) v += v >= 0 ? 0.05 : -0.05;  // keep away from the kink
    const auto proj = random_tensor({4, 5}, rng);
    ReLU<double> relu;
    relu.forward_train(x);
    auto dx = relu.backward(proj);
    auto r = check_gradient(x.data(), std::vector<double>(dx.data().begin(), dx.data().end()),
                            [&] { return dot(relu.forward_infer(x), proj); });
    worst = std::max(worst, r.max_relative_error);
  }
  return worst;
}

inline double gradcheck_dropout_fixed_mask(int trials = kTrials) {
  using namespace detail;
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(5000 + trial);
    auto x = random_tensor({4, 6}, rng);
    const auto proj = random_tensor({4, 6}, rng);
    Dropout<double> drop(0.4, 77 + trial);
    drop.forward_train(x);
    auto dx = drop.backward(proj);
    auto r = check_gradient(x.data(), std::vector<double>(dx.data().begin(), dx.data().end()), [&] {
      drop.reseed(77 + trial);
      return dot(drop.forward_train(x), proj);
    });
    worst = std::max(worst, r.max_relative_error);
  }
  return worst;
}

inline double gradcheck_softmax_cross_entropy(int trials = kTrials) {
  using namespace detail;
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(6000 + trial);
    auto logits = random_tensor({4, 2}, rng, 3.0);
    std::vector<int> labels;
    for (int i = 0; i < 4; ++i) labels.push_back(static_cast<int>(uniform_index(rng, 2)));
    const auto out = softmax_cross_entropy(logits, labels);
    auto r = check_gradient(logits.data(),
                            std::vector<double>(out.grad_logits.data().begin(), out.grad_logits.data().end()),
                            [&] { return softmax_cross_entropy(logits, labels).loss; });
    worst = std::max(worst, r.max_relative_error);
  }
  return worst;
}

namespace detail {

inline void randomize_bn(TemporalConvBlock<double>&, ParameterStore<double>& store, Rng& rng) {
  for (auto& p : store) {
    if (p.name.find("bn_gamma") != std::string::npos)
      for (double& v : p.tensor.data()) v = 0.5 + uniform01(rng);
    if (p.name.find("bn_beta") != std::string::npos)
      for (double& v : p.tensor.data()) v = uniform01(rng) - 0.5;
  }
}

}  // namespace detail

inline double gradcheck_temporal_conv_block_train_mode(int trials = kTrials) {
  using namespace detail;
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(7000 + trial);
    ParameterStore<double> store;
    TemporalConvBlock<double> conv(store, "conv", {{1, 2, 3}, 2}, 3);
    conv.initialize(rng);
    randomize_bn(conv, store, rng);
    auto x = random_tensor({3, 6, 3}, rng);
    const auto proj = random_tensor({3, conv.output_width()}, rng);
    auto loss = [&] { return dot(conv.forward_train(x), proj); };
    for (auto& p : store)
      if (p.trainable) p.tensor.ensure_grad();
    conv.forward_train(x);
    auto dx = conv.backward(proj);
    worst = std::max(worst, check_gradient(x.data(), std::vector<double>(dx.data().begin(), dx.data().end()), loss)
                                .max_relative_error);
    for (auto& p : store) {
      if (!p.trainable) continue;
      worst = std::max(worst, check_gradient(p.tensor.data(), grad_copy(p), loss).max_relative_error);
    }
  }
  return worst;
}

inline double gradcheck_temporal_conv_block_with_padding_shortcut(int trials = kTrials) {
  using namespace detail;
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(8000 + trial);
    ParameterStore<double> store;
    TemporalConvBlock<double> conv(store, "conv", {{1, 2, 3}, 2}, 3, true);
    conv.initialize(rng);
    randomize_bn(conv, store, rng);
    const std::size_t batch = 3, length = 8, e = 3;
    auto x = random_tensor({batch, length, e}, rng);
    std::vector<std::size_t> real(batch);
    for (std::size_t b = 0; b < batch; ++b) {
      real[b] = 1 + uniform_index(rng, length - 1);
      for (std::size_t t = real[b]; t < length; ++t)
        for (std::size_t k = 0; k < e; ++k) x[(b * length + t) * e + k] = 0.0;
    }
    const auto proj = random_tensor({batch, conv.output_width()}, rng);
    auto loss = [&] { return dot(conv.forward_train(x), proj); };
    for (auto& p : store)
      if (p.trainable) p.tensor.ensure_grad();
    conv.forward_train(x);
    auto dx = conv.backward(proj);
    for (auto& p : store) {
      if (!p.trainable) continue;
      worst = std::max(worst, check_gradient(p.tensor.data(), grad_copy(p), loss).max_relative_error);
    }
    // Input gradient is complete on the real (non-padding) rows.
    for (std::size_t b = 0; b < batch; ++b) {
      auto values = x.data().subspan(b * length * e, real[b] * e);
      std::vector<double> analytic(dx.data().begin() + b * length * e,
                                   dx.data().begin() + b * length * e + real[b] * e);
      worst = std::max(worst, check_gradient(values, analytic, loss).max_relative_error);
    }
  }
  return worst;
}

/// Every layer check, by layer name.
inline std::vector<std::pair<std::string, std::function<double(int)>>> layer_gradchecks() {
  return {
      {"embedding", gradcheck_embedding},
      {"dense", gradcheck_dense},
      {"batch_norm_train_mode", gradcheck_batch_norm_train_mode},
      {"relu", gradcheck_relu},
      {"dropout_fixed_mask", gradcheck_dropout_fixed_mask},
      {"softmax_cross_entropy", gradcheck_softmax_cross_entropy},
      {"temporal_conv_block_train_mode", gradcheck_temporal_conv_block_train_mode},
      {"temporal_conv_block_with_padding_shortcut", gradcheck_temporal_conv_block_with_padding_shortcut},
  };
}

}  // namespace hmclf::testing
