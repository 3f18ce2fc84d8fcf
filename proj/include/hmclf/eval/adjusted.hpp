#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hmclf/error.hpp"

namespace hmclf::eval {

/// Judged counts split by sampling-model group (s+/s-), evaluated-model
/// prediction (f+/f-) and editorial label (P/N), plus the weight beta applied
/// to every s- stratum.
struct AdjustedConfusion {
  std::uint64_t p_sp_fp = 0;  ///< P_{s+,f+}
  std::uint64_t p_sp_fn = 0;  ///< P_{s+,f-}
  std::uint64_t p_sn_fp = 0;  ///< P_{s-,f+}
  std::uint64_t p_sn_fn = 0;  ///< P_{s-,f-}
  std::uint64_t n_sp_fp = 0;  ///< N_{s+,f+}
  std::uint64_t n_sp_fn = 0;  ///< N_{s+,f-}
  std::uint64_t n_sn_fp = 0;  ///< N_{s-,f+}
  std::uint64_t n_sn_fn = 0;  ///< N_{s-,f-}
  double beta = 1.0;

  std::uint64_t total() const {
    return p_sp_fp + p_sp_fn + p_sn_fp + p_sn_fn + n_sp_fp + n_sp_fn + n_sn_fp + n_sn_fn;
  }
};

/// Undefined values (empty denominators) are nullopt, never 0 or 1.
struct Metrics {
  std::optional<double> precision;
  std::optional<double> recall;
};

inline std::optional<double> safe_ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}

/// Oversampling-adjusted precision and recall: every s- count is weighted by beta.
inline Metrics adjusted_metrics(const AdjustedConfusion& c) {
  if (!(c.beta > 0.0)) throw UsageError("beta must be positive");
  const double b = c.beta;
  const double tp = static_cast<double>(c.p_sp_fp) + b * static_cast<double>(c.p_sn_fp);
  const double fp = static_cast<double>(c.n_sp_fp) + b * static_cast<double>(c.n_sn_fp);
  const double fn = static_cast<double>(c.p_sp_fn) + b * static_cast<double>(c.p_sn_fn);
  return {safe_ratio(tp, tp + fp), safe_ratio(tp, tp + fn)};
}

/// Precision and recall over the pooled judged counts, ignoring beta.
inline Metrics unadjusted_metrics(const AdjustedConfusion& c) {
  AdjustedConfusion pooled = c;
  pooled.beta = 1.0;
  return adjusted_metrics(pooled);
}

/// Non-empty when beta falls outside the usual [1, 10] range.
inline std::optional<std::string> beta_warning(double beta) {
  if (beta >= 1.0 && beta <= 10.0) return std::nullopt;
  return "beta " + std::to_string(beta) + " is outside the typical range [1, 10]";
}

}  // namespace hmclf::eval
