#pragma once

#include <algorithm>
#include <limits>
#include <span>

#include "hmclf/eval/sampling.hpp"

namespace hmclf::eval {

struct RecallAtPrecision {
  double recall = 0.0;  ///< adjusted recall; 0 when no threshold qualifies
  std::optional<double> precision;
  std::optional<double> threshold;  ///< psi_f positive iff score_f >= threshold
};

/// Sweeps every distinct score_f from high to low and keeps the largest
/// adjusted recall whose adjusted precision reaches `target`. Among thresholds
/// with that recall the highest one is reported.
inline RecallAtPrecision recall_at_precision(std::span<const JudgedSample> samples, double beta, double target) {
  if (!(beta > 0.0)) throw UsageError("beta must be positive");
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return samples[a].score_f > samples[b].score_f; });
  // Start with every sample predicted negative and move score groups across.
  AdjustedConfusion c = confusion_at(samples, std::numeric_limits<double>::infinity(), beta);
  if (c.p_sp_fn + c.p_sn_fn == 0) throw DataError("recall at precision needs at least one positive judged sample");

  RecallAtPrecision best;
  for (std::size_t i = 0; i < order.size();) {
    const double t = samples[order[i]].score_f;
    for (; i < order.size() && samples[order[i]].score_f == t; ++i) {
      const auto& s = samples[order[i]];
      const bool s_pos = s.group == Group::kSPlus;
      if (s.gold == 1) {
        (s_pos ? c.p_sp_fn : c.p_sn_fn) -= 1;
        (s_pos ? c.p_sp_fp : c.p_sn_fp) += 1;
      } else {
        (s_pos ? c.n_sp_fn : c.n_sn_fn) -= 1;
        (s_pos ? c.n_sp_fp : c.n_sn_fp) += 1;
      }
    }
    const auto m = adjusted_metrics(c);
    if (*m.precision >= target && (!best.threshold || *m.recall > best.recall)) best = {*m.recall, m.precision, t};
  }
  return best;
}

}  // namespace hmclf::eval
