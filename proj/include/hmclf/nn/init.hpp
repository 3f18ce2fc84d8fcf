#pragma once

#include <cmath>

#include "hmclf/nn/parameter.hpp"
#include "hmclf/util/random.hpp"

namespace hmclf::nn {

/// Glorot/Xavier uniform: U(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
template <typename T>
void glorot_uniform(Parameter<T>& p, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (T& v : p.tensor.data()) v = static_cast<T>((2.0 * uniform01(rng) - 1.0) * a);
}

template <typename T>
void uniform_init(Parameter<T>& p, double limit, Rng& rng) {
  for (T& v : p.tensor.data()) v = static_cast<T>((2.0 * uniform01(rng) - 1.0) * limit);
}

template <typename T>
void fill(Parameter<T>& p, T value) {
  for (T& v : p.tensor.data()) v = value;
}

}  // namespace hmclf::nn
