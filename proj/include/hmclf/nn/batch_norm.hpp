#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hmclf/nn/init.hpp"
#include "hmclf/nn/parameter.hpp"

namespace hmclf::nn {

struct BatchNormOptions {
  double momentum = 0.99;
  double epsilon = 1e-5;
};

/// Weight of the newest batch in the bias-corrected running average after
/// `count` batches: (1 - m) / (1 - m^count). The first batch sets the moments
/// outright and the weight decays to 1 - m, so the initial values never leak
/// into inference.
inline double running_update_weight(double momentum, double count) {
  return (1.0 - momentum) / (1.0 - std::pow(momentum, count));
}

/// Folds one batch's moments into the running moments and bumps the counter.
template <typename T>
void update_running_moments(Parameter<T>& mean_p, Parameter<T>& var_p, Parameter<T>& count_p, double momentum,
                            const std::vector<double>& mean, const std::vector<double>& var) {
  T& count = count_p.tensor.data()[0];
  count += T{1};
  const double w = running_update_weight(momentum, static_cast<double>(count));
  auto rm = mean_p.tensor.data();
  auto rv = var_p.tensor.data();
  for (std::size_t j = 0; j < rm.size(); ++j) {
    rm[j] = static_cast<T>(rm[j] + w * (mean[j] - rm[j]));
    rv[j] = static_cast<T>(rv[j] + w * (var[j] - rv[j]));
  }
}

/// Per-feature batch normalization over every leading axis; the last axis is
/// the feature axis. Running moments live in the store as non-trainable
/// parameters so they are checkpointed with the weights.
template <typename T>
class BatchNorm {
 public:
  BatchNorm(ParameterStore<T>& store, const std::string& name, std::size_t features,
            BatchNormOptions options = {})
      : gamma_(&store.add(name + "/gamma", {features})),
        beta_(&store.add(name + "/beta", {features})),
        running_mean_(&store.add(name + "/running_mean", {features}, false)),
        running_var_(&store.add(name + "/running_var", {features}, false)),
        running_count_(&store.add(name + "/running_count", {1}, false)),
        features_(features),
        options_(options) {
    reset();
  }

  void reset() {
    fill(*gamma_, T{1});
    fill(*beta_, T{0});
    fill(*running_mean_, T{0});
    fill(*running_var_, T{1});
    fill(*running_count_, T{0});
  }

  std::size_t features() const noexcept { return features_; }
  const BatchNormOptions& options() const noexcept { return options_; }
  Parameter<T>& gamma() noexcept { return *gamma_; }
  Parameter<T>& beta() noexcept { return *beta_; }
  const Parameter<T>& running_mean() const noexcept { return *running_mean_; }
  const Parameter<T>& running_var() const noexcept { return *running_var_; }

  Tensor<T> forward(const Tensor<T>& x, Mode mode) {
    return mode == Mode::kTrain ? forward_train(x) : forward_infer(x);
  }

  Tensor<T> forward_train(const Tensor<T>& x) {
    const std::size_t rows = check(x);
    if (rows < 2) throw UsageError("batch norm in train mode needs a batch of at least 2");
    const std::size_t c = features_;
    std::vector<double> mean(c, 0.0), var(c, 0.0);
    auto in = x.data();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < c; ++j) mean[j] += in[r * c + j];
    for (std::size_t j = 0; j < c; ++j) mean[j] /= static_cast<double>(rows);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < c; ++j) {
        const double d = in[r * c + j] - mean[j];
        var[j] += d * d;
      }
    inv_std_.assign(c, 0.0);
    for (std::size_t j = 0; j < c; ++j) {
      var[j] /= static_cast<double>(rows);
      inv_std_[j] = 1.0 / std::sqrt(var[j] + options_.epsilon);
    }
    xhat_ = Tensor<T>(x.shape());
    Tensor<T> y(x.shape());
    auto xh = xhat_.data();
    auto out = y.data();
    auto g = gamma_->tensor.data();
    auto b = beta_->tensor.data();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < c; ++j) {
        const std::size_t i = r * c + j;
        const double n = (in[i] - mean[j]) * inv_std_[j];
        xh[i] = static_cast<T>(n);
        out[i] = static_cast<T>(g[j] * n + b[j]);
      }
    update_running(mean, var);
    return y;
  }

  Tensor<T> forward_infer(const Tensor<T>& x) const {
    const std::size_t rows = check(x);
    const std::size_t c = features_;
    Tensor<T> y(x.shape());
    auto in = x.data();
    auto out = y.data();
    auto g = gamma_->tensor.data();
    auto b = beta_->tensor.data();
    auto rm = running_mean_->tensor.data();
    auto rv = running_var_->tensor.data();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < c; ++j) {
        const std::size_t i = r * c + j;
        const double n = (in[i] - static_cast<double>(rm[j])) /
                         std::sqrt(static_cast<double>(rv[j]) + options_.epsilon);
        out[i] = static_cast<T>(g[j] * n + b[j]);
      }
    return y;
  }

  /// Gradient w.r.t. the input of the last train-mode forward; accumulates
  /// gamma/beta gradients.
  Tensor<T> backward(const Tensor<T>& grad_out) {
    if (grad_out.shape() != xhat_.shape()) throw UsageError("batch norm backward: shape mismatch");
    const std::size_t c = features_;
    const std::size_t rows = grad_out.size() / c;
    std::vector<double> sum_dy(c, 0.0), sum_dy_xhat(c, 0.0);
    auto dy = grad_out.data();
    auto xh = xhat_.data();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < c; ++j) {
        const std::size_t i = r * c + j;
        sum_dy[j] += dy[i];
        sum_dy_xhat[j] += static_cast<double>(dy[i]) * xh[i];
      }
    if (gamma_->trainable) {
      auto gg = gamma_->tensor.ensure_grad();
      for (std::size_t j = 0; j < c; ++j) gg[j] += static_cast<T>(sum_dy_xhat[j]);
    }
    if (beta_->trainable) {
      auto gb = beta_->tensor.ensure_grad();
      for (std::size_t j = 0; j < c; ++j) gb[j] += static_cast<T>(sum_dy[j]);
    }
    Tensor<T> dx(grad_out.shape());
    auto out = dx.data();
    auto g = gamma_->tensor.data();
    const double n = static_cast<double>(rows);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < c; ++j) {
        const std::size_t i = r * c + j;
        out[i] = static_cast<T>(g[j] * inv_std_[j] / n *
                                (n * dy[i] - sum_dy[j] - xh[i] * sum_dy_xhat[j]));
      }
    return dx;
  }

 private:
  std::size_t check(const Tensor<T>& x) const {
    if (x.rank() < 1 || x.shape().back() != features_) {
      throw UsageError("batch norm expects last axis " + std::to_string(features_) + ", got " +
                       shape_string(x.shape()));
    }
    return x.size() / features_;
  }

  void update_running(const std::vector<double>& mean, const std::vector<double>& var) {
    update_running_moments(*running_mean_, *running_var_, *running_count_, options_.momentum, mean, var);
  }

  Parameter<T>* gamma_;
  Parameter<T>* beta_;
  Parameter<T>* running_mean_;
  Parameter<T>* running_var_;
  Parameter<T>* running_count_;
  std::size_t features_;
  BatchNormOptions options_;
  Tensor<T> xhat_;
  std::vector<double> inv_std_;
};

}  // namespace hmclf::nn
