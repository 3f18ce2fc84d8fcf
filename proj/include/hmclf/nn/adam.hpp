#pragma once

#include <cmath>
#include <span>

#include "hmclf/nn/parameter.hpp"

namespace hmclf::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// One bias-corrected Adam update over every trainable parameter.
/// Non-trainable parameters are skipped entirely (data, moments and step
/// count stay untouched).
template <typename T>
void adam_step(std::span<Parameter<T>* const> params, const AdamConfig& cfg) {
  for (auto* p : params) {
    if (p->trainable && !p->tensor.has_grad()) {
      throw UsageError("trainable parameter '" + p->name + "' has no gradient");
    }
  }
  for (auto* p : params) {
    if (!p->trainable) continue;
    p->step_count += 1;
    const double t = static_cast<double>(p->step_count);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    auto w = p->tensor.data();
    auto g = p->tensor.grad();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = g[i];
      const double m = cfg.beta1 * p->adam_m[i] + (1.0 - cfg.beta1) * gi;
      const double v = cfg.beta2 * p->adam_v[i] + (1.0 - cfg.beta2) * gi * gi;
      p->adam_m[i] = static_cast<T>(m);
      p->adam_v[i] = static_cast<T>(v);
      const double m_hat = m / bc1;
      const double v_hat = v / bc2;
      w[i] = static_cast<T>(w[i] - cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon));
    }
  }
}

}  // namespace hmclf::nn
