#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hmclf/nn/init.hpp"
#include "hmclf/nn/parameter.hpp"

namespace hmclf::nn {

/// A [batch, length] block of token indices, row-major.
struct IndexBatch {
  std::size_t batch = 0;
  std::size_t length = 0;
  std::vector<std::int32_t> ids;

  std::span<const std::int32_t> row(std::size_t b) const {
    return std::span<const std::int32_t>(ids).subspan(b * length, length);
  }
};

/// Look-up table mapping indices [B, s] to vectors [B, s, e]. Index 0 is the
/// padding row; when `padding_row_fixed` is set it stays zero and never
/// receives gradient.
template <typename T>
class Embedding {
 public:
  Embedding(ParameterStore<T>& store, const std::string& name, std::size_t vocab_size,
            std::size_t dim, bool padding_row_fixed)
      : table_(&store.add(name + "/table", {vocab_size, dim})),
        vocab_size_(vocab_size),
        dim_(dim),
        padding_row_fixed_(padding_row_fixed) {}

  void initialize(Rng& rng) {
    uniform_init(*table_, 0.05, rng);
    if (padding_row_fixed_) std::fill_n(table_->tensor.data().begin(), dim_, T{0});
  }

  std::size_t vocab_size() const noexcept { return vocab_size_; }
  std::size_t dim() const noexcept { return dim_; }
  Parameter<T>& table() noexcept { return *table_; }
  const Parameter<T>& table() const noexcept { return *table_; }

  Tensor<T> forward(const IndexBatch& idx) const {
    validate(idx);
    Tensor<T> out({idx.batch, idx.length, dim_});
    auto src = table_->tensor.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < idx.ids.size(); ++i) {
      const auto row = static_cast<std::size_t>(idx.ids[i]);
      std::copy_n(src.begin() + row * dim_, dim_, dst.begin() + i * dim_);
    }
    return out;
  }

  /// Accumulates d(loss)/d(table) from d(loss)/d(output). Rows never looked
  /// up receive nothing. `rows_per_example`, when given, limits each example
  /// to its leading positions (the remainder is known to carry no gradient).
  void backward(const IndexBatch& idx, const Tensor<T>& grad_out,
                std::span<const std::size_t> rows_per_example = {}) {
    if (!table_->trainable) return;
    auto g = table_->tensor.ensure_grad();
    auto src = grad_out.data();
    for (std::size_t b = 0; b < idx.batch; ++b) {
      const std::size_t limit = rows_per_example.empty() ? idx.length : rows_per_example[b];
      for (std::size_t t = 0; t < limit; ++t) {
        const std::size_t i = b * idx.length + t;
        const auto row = static_cast<std::size_t>(idx.ids[i]);
        if (row == 0 && padding_row_fixed_) continue;
        T* dst = g.data() + row * dim_;
        const T* from = src.data() + i * dim_;
        for (std::size_t k = 0; k < dim_; ++k) dst[k] += from[k];
      }
    }
  }

 private:
  void validate(const IndexBatch& idx) const {
    if (idx.ids.size() != idx.batch * idx.length) {
      throw UsageError("index batch size does not match its declared shape");
    }
    for (std::size_t i = 0; i < idx.ids.size(); ++i) {
      const auto v = idx.ids[i];
      if (v < 0 || static_cast<std::size_t>(v) >= vocab_size_) {
        throw UsageError("embedding index " + std::to_string(v) + " out of range [0, " +
                         std::to_string(vocab_size_) + ") at batch " +
                         std::to_string(i / std::max<std::size_t>(idx.length, 1)) + ", position " +
                         std::to_string(i % std::max<std::size_t>(idx.length, 1)));
      }
    }
  }

  Parameter<T>* table_;
  std::size_t vocab_size_;
  std::size_t dim_;
  bool padding_row_fixed_;
};

}  // namespace hmclf::nn
