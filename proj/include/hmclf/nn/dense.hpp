#pragma once

#include <cmath>
#include <string>

#include "hmclf/nn/init.hpp"
#include "hmclf/nn/parameter.hpp"

namespace hmclf::nn {

/// Fully connected layer without activation: y = x W + b with W stored
/// [in, out]. L1/L2 penalties on W enter the training loss through
/// penalty()/add_penalty_grad(); they never change the forward output.
template <typename T>
class Dense {
 public:
  Dense(ParameterStore<T>& store, const std::string& name, std::size_t in, std::size_t out,
        double l1 = 0.0, double l2 = 0.0)
      : weight_(&store.add(name + "/weight", {in, out})),
        bias_(&store.add(name + "/bias", {out})),
        in_(in),
        out_(out),
        l1_(l1),
        l2_(l2) {
    if (l1 < 0.0 || l2 < 0.0) throw UsageError("dense penalties must be non-negative");
  }

  void initialize(Rng& rng) {
    glorot_uniform(*weight_, in_, out_, rng);
    fill(*bias_, T{0});
  }

  std::size_t in_features() const noexcept { return in_; }
  std::size_t out_features() const noexcept { return out_; }
  double l1() const noexcept { return l1_; }
  double l2() const noexcept { return l2_; }
  Parameter<T>& weight() noexcept { return *weight_; }
  Parameter<T>& bias() noexcept { return *bias_; }

  Tensor<T> forward_train(const Tensor<T>& x) {
    input_ = x;
    return forward_infer(x);
  }

  Tensor<T> forward_infer(const Tensor<T>& x) const {
    if (x.rank() != 2 || x.dim(1) != in_) {
      throw UsageError("dense expects [B, " + std::to_string(in_) + "], got " + shape_string(x.shape()));
    }
    const std::size_t batch = x.dim(0);
    Tensor<T> y({batch, out_});
    const T* w = weight_->tensor.data().data();
    const T* b = bias_->tensor.data().data();
    for (std::size_t r = 0; r < batch; ++r) {
      T* yr = y.data().data() + r * out_;
      const T* xr = x.data().data() + r * in_;
      for (std::size_t j = 0; j < out_; ++j) yr[j] = b[j];
      for (std::size_t i = 0; i < in_; ++i) {
        const T xi = xr[i];
        const T* wi = w + i * out_;
        for (std::size_t j = 0; j < out_; ++j) yr[j] += xi * wi[j];
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& grad_out) {
    if (grad_out.rank() != 2 || grad_out.dim(1) != out_ || grad_out.dim(0) != input_.dim(0)) {
      throw UsageError("dense backward: gradient shape " + shape_string(grad_out.shape()));
    }
    const std::size_t batch = grad_out.dim(0);
    const T* w = weight_->tensor.data().data();
    Tensor<T> dx({batch, in_});
    if (weight_->trainable) {
      T* dw = weight_->tensor.ensure_grad().data();
      for (std::size_t r = 0; r < batch; ++r) {
        const T* xr = input_.data().data() + r * in_;
        const T* dyr = grad_out.data().data() + r * out_;
        for (std::size_t i = 0; i < in_; ++i) {
          const T xi = xr[i];
          T* dwi = dw + i * out_;
          for (std::size_t j = 0; j < out_; ++j) dwi[j] += xi * dyr[j];
        }
      }
    }
    if (bias_->trainable) {
      T* db = bias_->tensor.ensure_grad().data();
      for (std::size_t r = 0; r < batch; ++r) {
        const T* dyr = grad_out.data().data() + r * out_;
        for (std::size_t j = 0; j < out_; ++j) db[j] += dyr[j];
      }
    }
    for (std::size_t r = 0; r < batch; ++r) {
      const T* dyr = grad_out.data().data() + r * out_;
      T* dxr = dx.data().data() + r * in_;
      for (std::size_t i = 0; i < in_; ++i) {
        const T* wi = w + i * out_;
        T acc{0};
        for (std::size_t j = 0; j < out_; ++j) acc += wi[j] * dyr[j];
        dxr[i] = acc;
      }
    }
    return dx;
  }

  double penalty() const {
    if (l1_ == 0.0 && l2_ == 0.0) return 0.0;
    double abs_sum = 0.0, sq_sum = 0.0;
    for (T w : weight_->tensor.data()) {
      abs_sum += std::abs(static_cast<double>(w));
      sq_sum += static_cast<double>(w) * w;
    }
    return l1_ * abs_sum + l2_ * sq_sum;
  }

  void add_penalty_grad() {
    if ((l1_ == 0.0 && l2_ == 0.0) || !weight_->trainable) return;
    auto w = weight_->tensor.data();
    auto g = weight_->tensor.ensure_grad();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double wi = w[i];
      const double sign = wi > 0.0 ? 1.0 : (wi < 0.0 ? -1.0 : 0.0);
      g[i] += static_cast<T>(l1_ * sign + 2.0 * l2_ * wi);
    }
  }

 private:
  Parameter<T>* weight_;
  Parameter<T>* bias_;
  std::size_t in_;
  std::size_t out_;
  double l1_;
  double l2_;
  Tensor<T> input_;
};

}  // namespace hmclf::nn
