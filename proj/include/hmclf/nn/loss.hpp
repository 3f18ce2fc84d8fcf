#pragma once

#include <cmath>
#include <span>

#include "hmclf/nn/tensor.hpp"

namespace hmclf::nn {

template <typename T>
struct SoftmaxCrossEntropy {
  double loss = 0.0;            ///< mean negative log-likelihood
  Tensor<T> probabilities;      ///< [B, C]
  Tensor<T> grad_logits;        ///< d(loss)/d(logits), [B, C]
};

/// Row-wise softmax of [B, C] logits with the log-sum-exp shift.
template <typename T>
Tensor<T> softmax(const Tensor<T>& logits) {
  require_rank(logits, 2, "softmax");
  const std::size_t batch = logits.dim(0), classes = logits.dim(1);
  Tensor<T> p(logits.shape());
  for (std::size_t b = 0; b < batch; ++b) {
    auto z = logits.row(b);
    double mx = z[0];
    for (std::size_t c = 1; c < classes; ++c) mx = std::max(mx, static_cast<double>(z[c]));
    double denom = 0.0;
    for (std::size_t c = 0; c < classes; ++c) denom += std::exp(z[c] - mx);
    for (std::size_t c = 0; c < classes; ++c) p[b * classes + c] = static_cast<T>(std::exp(z[c] - mx) / denom);
  }
  return p;
}

template <typename T>
SoftmaxCrossEntropy<T> softmax_cross_entropy(const Tensor<T>& logits, std::span<const int> labels) {
  require_rank(logits, 2, "softmax_cross_entropy");
  const std::size_t batch = logits.dim(0), classes = logits.dim(1);
  if (labels.size() != batch) throw UsageError("label count does not match batch size");
  for (T v : logits.data()) {
    if (!std::isfinite(static_cast<double>(v))) throw DivergenceError("non-finite logit");
  }
  SoftmaxCrossEntropy<T> out;
  out.probabilities = softmax(logits);
  out.grad_logits = Tensor<T>(logits.shape());
  double total = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    const int y = labels[b];
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw UsageError("label " + std::to_string(y) + " out of range at position " + std::to_string(b));
    }
    auto z = logits.row(b);
    double mx = z[0];
    for (std::size_t c = 1; c < classes; ++c) mx = std::max(mx, static_cast<double>(z[c]));
    double denom = 0.0;
    for (std::size_t c = 0; c < classes; ++c) denom += std::exp(z[c] - mx);
    total += -(z[static_cast<std::size_t>(y)] - mx - std::log(denom));
    for (std::size_t c = 0; c < classes; ++c) {
      const double p = std::exp(z[c] - mx) / denom;
      out.grad_logits[b * classes + c] =
          static_cast<T>((p - (static_cast<std::size_t>(y) == c ? 1.0 : 0.0)) / static_cast<double>(batch));
    }
  }
  out.loss = total / static_cast<double>(batch);
  return out;
}

}  // namespace hmclf::nn
