#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hmclf/nn/tensor.hpp"
#include "hmclf/util/random.hpp"

namespace hmclf::nn {

template <typename T>
class ReLU {
 public:
  Tensor<T> forward_train(const Tensor<T>& x) {
    Tensor<T> y = forward_infer(x);
    mask_.assign(x.size(), 0);
    for (std::size_t i = 0; i < x.size(); ++i) mask_[i] = x[i] > T{0};
    return y;
  }

  Tensor<T> forward_infer(const Tensor<T>& x) const {
    Tensor<T> y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > T{0} ? x[i] : T{0};
    return y;
  }

  Tensor<T> backward(const Tensor<T>& grad_out) const {
    if (grad_out.size() != mask_.size()) throw UsageError("relu backward: shape mismatch");
    Tensor<T> dx(grad_out.shape());
    for (std::size_t i = 0; i < mask_.size(); ++i) dx[i] = mask_[i] ? grad_out[i] : T{0};
    return dx;
  }

 private:
  std::vector<std::uint8_t> mask_;
};

/// Inverted dropout: train mode zeroes each element with probability `rate`
/// and scales survivors by 1/(1 - rate); inference is the identity.
template <typename T>
class Dropout {
 public:
  explicit Dropout(double rate, std::uint64_t seed = 0) : rate_(rate), rng_(seed) {
    if (!(rate >= 0.0 && rate < 1.0)) throw UsageError("dropout rate must be in [0, 1)");
  }

  double rate() const noexcept { return rate_; }
  void reseed(std::uint64_t seed) { rng_.seed(seed); }

  Tensor<T> forward_train(const Tensor<T>& x) {
    scale_.assign(x.size(), T{1});
    Tensor<T> y(x.shape());
    const T keep_scale = static_cast<T>(1.0 / (1.0 - rate_));
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (rate_ > 0.0) scale_[i] = uniform01(rng_) < rate_ ? T{0} : keep_scale;
      y[i] = x[i] * scale_[i];
    }
    return y;
  }

  Tensor<T> forward_infer(const Tensor<T>& x) const { return x; }

  Tensor<T> backward(const Tensor<T>& grad_out) const {
    if (grad_out.size() != scale_.size()) throw UsageError("dropout backward: shape mismatch");
    Tensor<T> dx(grad_out.shape());
    for (std::size_t i = 0; i < scale_.size(); ++i) dx[i] = grad_out[i] * scale_[i];
    return dx;
  }

 private:
  double rate_;
  Rng rng_;
  std::vector<T> scale_;
};

/// Concatenates [B, w_i] tensors along the feature axis.
template <typename T>
Tensor<T> concat_features(std::span<const Tensor<T>* const> parts) {
  if (parts.empty()) throw UsageError("concat of nothing");
  const std::size_t batch = parts.front()->dim(0);
  std::size_t width = 0;
  for (const auto* p : parts) {
    if (p->rank() != 2 || p->dim(0) != batch) throw UsageError("concat: mismatched batch");
    width += p->dim(1);
  }
  Tensor<T> out({batch, width});
  for (std::size_t b = 0; b < batch; ++b) {
    std::size_t offset = 0;
    for (const auto* p : parts) {
      auto src = p->row(b);
      std::copy(src.begin(), src.end(), out.data().begin() + b * width + offset);
      offset += src.size();
    }
  }
  return out;
}

/// Columns [begin, begin + width) of a [B, W] tensor.
template <typename T>
Tensor<T> slice_features(const Tensor<T>& x, std::size_t begin, std::size_t width) {
  if (x.rank() != 2 || begin + width > x.dim(1)) throw UsageError("slice out of range");
  const std::size_t batch = x.dim(0);
  Tensor<T> out({batch, width});
  for (std::size_t b = 0; b < batch; ++b) {
    auto src = x.row(b).subspan(begin, width);
    std::copy(src.begin(), src.end(), out.data().begin() + b * width);
  }
  return out;
}

}  // namespace hmclf::nn
