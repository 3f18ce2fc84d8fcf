#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hmclf/nn/batch_norm.hpp"
#include "hmclf/nn/init.hpp"
#include "hmclf/nn/parameter.hpp"

namespace hmclf::nn {

/// "Conv Block, [w_1..w_k], f": one temporal convolution per window size with
/// f filters each, stride 1.
struct ConvBlockSpec {
  std::vector<std::size_t> window_sizes;
  std::size_t filters = 0;

  std::size_t max_window() const {
    return window_sizes.empty() ? 0 : *std::max_element(window_sizes.begin(), window_sizes.end());
  }
  std::size_t output_width() const { return window_sizes.size() * filters; }

  void validate() const {
    if (window_sizes.empty() || filters == 0) throw UsageError("conv block needs windows and filters");
    for (auto w : window_sizes)
      if (w == 0) throw UsageError("conv window sizes must be positive");
  }
};

/// Temporal convolution -> batch norm -> ReLU -> max-pool over time, for every
/// window size, concatenated to [B, k*f].
///
/// Input is [B, s, e]. The convolution has no bias (the batch-norm shift plays
/// that role), so a window made only of all-zero rows has pre-activation
/// exactly 0. With `trailing_padding_shortcut` enabled those windows are not
/// materialized: they enter the batch statistics and the max as one value with
/// multiplicity, and no input gradient is produced for them. The forward output
/// and the weight gradients are the same as the dense computation; only the
/// input gradient at trailing zero rows is omitted, which is correct whenever
/// those rows come from a fixed padding embedding.
template <typename T>
class TemporalConvBlock {
 public:
  TemporalConvBlock(ParameterStore<T>& store, const std::string& name, ConvBlockSpec spec,
                    std::size_t embed_dim, bool trailing_padding_shortcut = false,
                    BatchNormOptions bn = {})
      : spec_(std::move(spec)), embed_dim_(embed_dim), shortcut_(trailing_padding_shortcut), bn_(bn) {
    spec_.validate();
    for (std::size_t w : spec_.window_sizes) {
      const std::string tag = name + "/w" + std::to_string(w);
      Group g;
      g.width = w;
      g.weight = &store.add(tag + "/weight", {w * embed_dim, spec_.filters});
      g.gamma = &store.add(tag + "/bn_gamma", {spec_.filters});
      g.beta = &store.add(tag + "/bn_beta", {spec_.filters});
      g.running_mean = &store.add(tag + "/bn_running_mean", {spec_.filters}, false);
      g.running_var = &store.add(tag + "/bn_running_var", {spec_.filters}, false);
      g.running_count = &store.add(tag + "/bn_running_count", {1}, false);
      fill(*g.gamma, T{1});
      fill(*g.beta, T{0});
      fill(*g.running_mean, T{0});
      fill(*g.running_var, T{1});
      fill(*g.running_count, T{0});
      groups_.push_back(g);
    }
  }

  void initialize(Rng& rng) {
    for (auto& g : groups_) {
      glorot_uniform(*g.weight, g.width * embed_dim_, spec_.filters, rng);
      fill(*g.gamma, T{1});
      fill(*g.beta, T{0});
      fill(*g.running_mean, T{0});
      fill(*g.running_var, T{1});
      fill(*g.running_count, T{0});
    }
  }

  const ConvBlockSpec& spec() const noexcept { return spec_; }
  std::size_t output_width() const { return spec_.output_width(); }
  std::size_t embed_dim() const noexcept { return embed_dim_; }
  bool uses_shortcut() const noexcept { return shortcut_; }

  /// Throws if a sequence of `length` cannot host the widest window.
  void check_length(std::size_t length) const {
    if (length < spec_.max_window()) {
      throw UsageError("sequence length " + std::to_string(length) + " is shorter than conv window " +
                       std::to_string(spec_.max_window()));
    }
  }

  Tensor<T> forward(const Tensor<T>& x, Mode mode) {
    return mode == Mode::kTrain ? forward_train(x) : forward_infer(x);
  }

  Tensor<T> forward_train(const Tensor<T>& x) {
    const auto [batch, length] = check_input(x);
    if (batch < 2) throw UsageError("conv block in train mode needs a batch of at least 2");
    batch_ = batch;
    length_ = length;
    lengths_ = active_lengths(x);
    cache_input(x);

    const std::size_t f = spec_.filters;
    Tensor<T> out({batch, spec_.output_width()});
    for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
      Group& g = groups_[gi];
      const std::size_t positions = length - g.width + 1;
      g.offsets.assign(batch + 1, 0);
      for (std::size_t b = 0; b < batch; ++b) g.offsets[b + 1] = g.offsets[b] + computed(positions, b);
      g.pre.assign(g.offsets[batch] * f, T{0});
      for (std::size_t b = 0; b < batch; ++b) {
        convolve(g, cached_row(b), computed(positions, b), g.pre.data() + g.offsets[b] * f);
      }

      const double n = static_cast<double>(batch * positions);
      const double n_pad = static_cast<double>(batch * positions - g.offsets[batch]);
      std::vector<double> sum(f, 0.0), sq(f, 0.0);
      for (std::size_t r = 0; r < g.offsets[batch]; ++r)
        for (std::size_t j = 0; j < f; ++j) sum[j] += g.pre[r * f + j];
      g.mean.assign(f, 0.0);
      g.inv_std.assign(f, 0.0);
      std::vector<double> var(f, 0.0);
      for (std::size_t j = 0; j < f; ++j) g.mean[j] = sum[j] / n;
      for (std::size_t r = 0; r < g.offsets[batch]; ++r)
        for (std::size_t j = 0; j < f; ++j) {
          const double d = g.pre[r * f + j] - g.mean[j];
          sq[j] += d * d;
        }
      for (std::size_t j = 0; j < f; ++j) {
        var[j] = (sq[j] + n_pad * g.mean[j] * g.mean[j]) / n;
        g.inv_std[j] = 1.0 / std::sqrt(var[j] + bn_.epsilon);
      }

      const T* gamma = g.gamma->tensor.data().data();
      const T* beta = g.beta->tensor.data().data();
      g.argmax.assign(batch * f, -1);
      g.max_z.assign(batch * f, 0.0);
      for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t rows = g.offsets[b + 1] - g.offsets[b];
        const T* pre = g.pre.data() + g.offsets[b] * f;
        for (std::size_t j = 0; j < f; ++j) {
          double best = -INFINITY;
          long best_t = -1;
          for (std::size_t t = 0; t < rows; ++t) {
            const double z = gamma[j] * (pre[t * f + j] - g.mean[j]) * g.inv_std[j] + beta[j];
            if (z > best) {
              best = z;
              best_t = static_cast<long>(t);
            }
          }
          if (rows < positions) {
            const double z_pad = gamma[j] * (-g.mean[j]) * g.inv_std[j] + beta[j];
            if (z_pad > best) {
              best = z_pad;
              best_t = -1;
            }
          }
          g.argmax[b * f + j] = best_t;
          g.max_z[b * f + j] = best;
          out[b * spec_.output_width() + gi * f + j] = static_cast<T>(best > 0.0 ? best : 0.0);
        }
      }

      update_running_moments(*g.running_mean, *g.running_var, *g.running_count, bn_.momentum, g.mean, var);
    }
    return out;
  }

  Tensor<T> forward_infer(const Tensor<T>& x) const {
    const auto [batch, length] = check_input(x);
    const std::vector<std::size_t> lengths = active_lengths(x);
    const std::size_t f = spec_.filters;
    Tensor<T> out({batch, spec_.output_width()});
    std::vector<T> pre;
    for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
      const Group& g = groups_[gi];
      const std::size_t positions = length - g.width + 1;
      const T* gamma = g.gamma->tensor.data().data();
      const T* beta = g.beta->tensor.data().data();
      const T* rm = g.running_mean->tensor.data().data();
      const T* rv = g.running_var->tensor.data().data();
      std::vector<double> scale(f), shift(f);
      for (std::size_t j = 0; j < f; ++j) {
        scale[j] = gamma[j] / std::sqrt(static_cast<double>(rv[j]) + bn_.epsilon);
        shift[j] = beta[j] - scale[j] * rm[j];
      }
      for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t rows = shortcut_ ? std::min(positions, lengths[b]) : positions;
        pre.assign(rows * f, T{0});
        convolve(g, x.data().data() + b * length * embed_dim_, rows, pre.data());
        for (std::size_t j = 0; j < f; ++j) {
          double best = -INFINITY;
          for (std::size_t t = 0; t < rows; ++t) best = std::max(best, scale[j] * pre[t * f + j] + shift[j]);
          if (rows < positions) best = std::max(best, shift[j]);
          out[b * spec_.output_width() + gi * f + j] = static_cast<T>(best > 0.0 ? best : 0.0);
        }
      }
    }
    return out;
  }

  /// Returns d(loss)/d(input) [B, s, e] and accumulates weight and batch-norm
  /// parameter gradients.
  Tensor<T> backward(const Tensor<T>& grad_out) {
    if (grad_out.rank() != 2 || grad_out.dim(0) != batch_ || grad_out.dim(1) != spec_.output_width()) {
      throw UsageError("conv block backward: gradient shape " + shape_string(grad_out.shape()));
    }
    const std::size_t f = spec_.filters;
    const std::size_t e = embed_dim_;
    Tensor<T> dx({batch_, length_, e});
    std::vector<T> dpre;
    std::vector<T> weight_t;
    for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
      Group& g = groups_[gi];
      const std::size_t positions = length_ - g.width + 1;
      const std::size_t span_k = g.width * e;
      const double n = static_cast<double>(batch_ * positions);
      const T* gamma = g.gamma->tensor.data().data();

      // Only the pooled position of each (example, filter) receives dz.
      std::vector<double> dz(batch_ * f, 0.0), xhat_at(batch_ * f, 0.0);
      std::vector<double> sum_dz(f, 0.0), sum_dz_xhat(f, 0.0);
      for (std::size_t b = 0; b < batch_; ++b) {
        for (std::size_t j = 0; j < f; ++j) {
          const std::size_t i = b * f + j;
          const long t = g.argmax[i];
          const double pre = t < 0 ? 0.0 : g.pre[(g.offsets[b] + static_cast<std::size_t>(t)) * f + j];
          xhat_at[i] = (pre - g.mean[j]) * g.inv_std[j];
          if (g.max_z[i] > 0.0) dz[i] = grad_out[b * spec_.output_width() + gi * f + j];
          sum_dz[j] += dz[i];
          sum_dz_xhat[j] += dz[i] * xhat_at[i];
        }
      }
      if (g.gamma->trainable) {
        auto gg = g.gamma->tensor.ensure_grad();
        for (std::size_t j = 0; j < f; ++j) gg[j] += static_cast<T>(sum_dz_xhat[j]);
      }
      if (g.beta->trainable) {
        auto gb = g.beta->tensor.ensure_grad();
        for (std::size_t j = 0; j < f; ++j) gb[j] += static_cast<T>(sum_dz[j]);
      }

      const bool need_weight = g.weight->trainable;
      T* dw = need_weight ? g.weight->tensor.ensure_grad().data() : nullptr;
      const T* w = g.weight->tensor.data().data();
      weight_t.assign(span_k * f, T{0});
      for (std::size_t k = 0; k < span_k; ++k)
        for (std::size_t j = 0; j < f; ++j) weight_t[j * span_k + k] = w[k * f + j];

      std::vector<double> coef(f), base(f);
      for (std::size_t j = 0; j < f; ++j) {
        coef[j] = gamma[j] * g.inv_std[j] / n;
        base[j] = -sum_dz[j];
      }
      for (std::size_t b = 0; b < batch_; ++b) {
        const std::size_t rows = g.offsets[b + 1] - g.offsets[b];
        const T* pre = g.pre.data() + g.offsets[b] * f;
        dpre.assign(rows * f, T{0});
        for (std::size_t t = 0; t < rows; ++t) {
          for (std::size_t j = 0; j < f; ++j) {
            const double xhat = (pre[t * f + j] - g.mean[j]) * g.inv_std[j];
            double d = base[j] - xhat * sum_dz_xhat[j];
            if (g.argmax[b * f + j] == static_cast<long>(t)) d += n * dz[b * f + j];
            dpre[t * f + j] = static_cast<T>(coef[j] * d);
          }
        }
        const T* xb = cached_row(b);
        T* dxb = dx.data().data() + b * length_ * e;
        if (need_weight) {
          for (std::size_t k = 0; k < span_k; ++k) {
            T* dwk = dw + k * f;
            for (std::size_t t = 0; t < rows; ++t) {
              const T xv = xb[t * e + k];
              const T* dp = dpre.data() + t * f;
              for (std::size_t j = 0; j < f; ++j) dwk[j] += xv * dp[j];
            }
          }
        }
        for (std::size_t t0 = 0; t0 < rows; t0 += kRowBlock) {
          const std::size_t t1 = std::min(rows, t0 + kRowBlock);
          for (std::size_t j = 0; j < f; ++j) {
            const T* wt = weight_t.data() + j * span_k;
            for (std::size_t t = t0; t < t1; ++t) {
              const T d = dpre[t * f + j];
              T* dwin = dxb + t * e;
              for (std::size_t k = 0; k < span_k; ++k) dwin[k] += d * wt[k];
            }
          }
        }
      }
    }
    return dx;
  }

  /// Rows of each example's input that may carry nonzero input gradient after
  /// the last train-mode forward.
  std::vector<std::size_t> gradient_rows() const {
    std::vector<std::size_t> rows(batch_);
    for (std::size_t b = 0; b < batch_; ++b) rows[b] = cached_rows_[b];
    return rows;
  }

 private:
  struct Group {
    std::size_t width = 0;
    Parameter<T>* weight = nullptr;  // [width * e, f]
    Parameter<T>* gamma = nullptr;
    Parameter<T>* beta = nullptr;
    Parameter<T>* running_mean = nullptr;
    Parameter<T>* running_var = nullptr;
    Parameter<T>* running_count = nullptr;
    // Train-mode cache.
    std::vector<std::size_t> offsets;
    std::vector<T> pre;
    std::vector<double> mean;
    std::vector<double> inv_std;
    std::vector<long> argmax;
    std::vector<double> max_z;
  };

  std::pair<std::size_t, std::size_t> check_input(const Tensor<T>& x) const {
    if (x.rank() != 3 || x.dim(2) != embed_dim_) {
      throw UsageError("conv block expects [B, s, " + std::to_string(embed_dim_) + "], got " +
                       shape_string(x.shape()));
    }
    check_length(x.dim(1));
    return {x.dim(0), x.dim(1)};
  }

  /// Per example: one past the last row that is not entirely zero (or s when
  /// the shortcut is disabled).
  std::vector<std::size_t> active_lengths(const Tensor<T>& x) const {
    const std::size_t batch = x.dim(0), length = x.dim(1);
    std::vector<std::size_t> out(batch, length);
    if (!shortcut_) return out;
    for (std::size_t b = 0; b < batch; ++b) {
      std::size_t last = length;
      while (last > 0) {
        const T* row = x.data().data() + (b * length + last - 1) * embed_dim_;
        if (std::any_of(row, row + embed_dim_, [](T v) { return v != T{0}; })) break;
        --last;
      }
      out[b] = last;
    }
    return out;
  }

  std::size_t computed(std::size_t positions, std::size_t b) const {
    return std::min(positions, lengths_[b]);
  }

  void cache_input(const Tensor<T>& x) {
    const std::size_t e = embed_dim_;
    cached_rows_.assign(batch_, 0);
    cache_offsets_.assign(batch_ + 1, 0);
    for (std::size_t b = 0; b < batch_; ++b) {
      cached_rows_[b] = std::min(length_, lengths_[b] + spec_.max_window() - 1);
      if (!shortcut_) cached_rows_[b] = length_;
      cache_offsets_[b + 1] = cache_offsets_[b] + cached_rows_[b] * e;
    }
    input_cache_.assign(cache_offsets_[batch_], T{0});
    for (std::size_t b = 0; b < batch_; ++b) {
      const T* src = x.data().data() + b * length_ * e;
      std::copy_n(src, cached_rows_[b] * e, input_cache_.data() + cache_offsets_[b]);
    }
  }

  const T* cached_row(std::size_t b) const { return input_cache_.data() + cache_offsets_[b]; }

  /// pre[t, j] = sum_k x[t*e + k] * W[k, j] for the first `rows` positions.
  void convolve(const Group& g, const T* x, std::size_t rows, T* pre) const {
    const std::size_t f = spec_.filters;
    const std::size_t span_k = g.width * embed_dim_;
    const T* w = g.weight->tensor.data().data();
    // Blocks of positions share each weight row while it is in cache.
    for (std::size_t t0 = 0; t0 < rows; t0 += kRowBlock) {
      const std::size_t t1 = std::min(rows, t0 + kRowBlock);
      for (std::size_t k = 0; k < span_k; ++k) {
        const T* wk = w + k * f;
        for (std::size_t t = t0; t < t1; ++t) {
          const T xv = x[t * embed_dim_ + k];
          T* dst = pre + t * f;
          for (std::size_t j = 0; j < f; ++j) dst[j] += xv * wk[j];
        }
      }
    }
  }

  static constexpr std::size_t kRowBlock = 8;

  ConvBlockSpec spec_;
  std::size_t embed_dim_;
  bool shortcut_;
  BatchNormOptions bn_;
  std::vector<Group> groups_;

  std::size_t batch_ = 0;
  std::size_t length_ = 0;
  std::vector<std::size_t> lengths_;
  std::vector<std::size_t> cached_rows_;
  std::vector<std::size_t> cache_offsets_;
  std::vector<T> input_cache_;
};

}  // namespace hmclf::nn
