#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "hmclf/nn/tensor.hpp"

namespace hmclf::nn {

template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> tensor;
  bool trainable = true;
  std::vector<T> adam_m;
  std::vector<T> adam_v;
  std::uint64_t step_count = 0;

  std::size_t size() const noexcept { return tensor.size(); }
};

/// Owns parameters in declaration order. Addresses are stable for the
/// lifetime of the store so layers may hold raw pointers into it.
template <typename T>
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;
  ParameterStore(ParameterStore&&) = default;
  ParameterStore& operator=(ParameterStore&&) = default;

  Parameter<T>& add(std::string name, Shape shape, bool trainable = true) {
    if (by_name_.contains(name)) throw UsageError("duplicate parameter name: " + name);
    Parameter<T>& p = params_.emplace_back();
    p.name = std::move(name);
    p.tensor = Tensor<T>(std::move(shape));
    p.trainable = trainable;
    p.adam_m.assign(p.tensor.size(), T{0});
    p.adam_v.assign(p.tensor.size(), T{0});
    by_name_.emplace(p.name, params_.size() - 1);
    return p;
  }

  Parameter<T>* find(const std::string& name) {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : &params_[it->second];
  }
  const Parameter<T>* find(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : &params_[it->second];
  }

  std::size_t size() const noexcept { return params_.size(); }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  std::vector<Parameter<T>*> pointers() {
    std::vector<Parameter<T>*> out;
    for (auto& p : params_) out.push_back(&p);
    return out;
  }

 private:
  std::deque<Parameter<T>> params_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

template <typename T>
void zero_grads(std::span<Parameter<T>* const> params) {
  for (auto* p : params) {
    if (p->trainable) {
      p->tensor.ensure_grad();
      p->tensor.zero_grad();
    }
  }
}

template <typename T>
void set_trainable(std::span<Parameter<T>* const> params, bool trainable) {
  for (auto* p : params) p->trainable = trainable;
}

}  // namespace hmclf::nn
