#pragma once

#include <span>
#include <string>
#include <vector>

#include "hmclf/eval/adjusted.hpp"
#include "hmclf/util/random.hpp"

namespace hmclf::eval {

enum class Group { kSPlus, kSMinus };

inline const char* to_string(Group g) { return g == Group::kSPlus ? "s+" : "s-"; }

inline Group group_from_string(const std::string& s) {
  if (s == "s+") return Group::kSPlus;
  if (s == "s-") return Group::kSMinus;
  throw DataError("unknown sampling group: " + s);
}

/// A population member scored by both models, with its true label (1 = positive).
struct ScoredItem {
  std::string id;
  double score_s = 0.0;
  double score_f = 0.0;
  int gold = 0;
};

/// An editorially judged sample.
struct JudgedSample {
  std::string message_id;
  double score_s = 0.0;
  double score_f = 0.0;
  int gold = 0;
  Group group = Group::kSPlus;

  bool operator==(const JudgedSample&) const = default;
};

/// Items with score_s >= cutoff_s form G+, the rest G-. k_ratio = |G-| / |G+|.
struct SamplingPlan {
  double cutoff_s = 0.5;
  double k_ratio = 1.0;
  std::size_t m_s_plus = 0;
  std::size_t m_s_minus = 0;
  std::size_t g_plus = 0;
  std::size_t g_minus = 0;

  /// beta = (M_{s+} / M_{s-}) * k.
  double beta() const {
    if (m_s_minus == 0) throw UsageError("sampling plan draws nothing from G-");
    return static_cast<double>(m_s_plus) / static_cast<double>(m_s_minus) * k_ratio;
  }

  /// Per-group sampling ratios r = M_{s+}/|G+| and r' = M_{s-}/|G-|; beta = r / r'.
  double r() const { return static_cast<double>(m_s_plus) / static_cast<double>(g_plus); }
  double r_prime() const { return static_cast<double>(m_s_minus) / static_cast<double>(g_minus); }
};

inline Group group_of(double score_s, double cutoff_s) {
  return score_s >= cutoff_s ? Group::kSPlus : Group::kSMinus;
}

/// Splits the population at `cutoff_s` and records group sizes and k.
inline SamplingPlan make_plan(std::span<const ScoredItem> population, double cutoff_s, std::size_t m_s_plus,
                              std::size_t m_s_minus) {
  SamplingPlan plan;
  plan.cutoff_s = cutoff_s;
  plan.m_s_plus = m_s_plus;
  plan.m_s_minus = m_s_minus;
  for (const auto& item : population) {
    (group_of(item.score_s, cutoff_s) == Group::kSPlus ? plan.g_plus : plan.g_minus) += 1;
  }
  if (plan.g_plus == 0 || plan.g_minus == 0) throw DataError("sampling cutoff leaves an empty group");
  if (m_s_plus > plan.g_plus) {
    throw DataError("requested " + std::to_string(m_s_plus) + " samples from G+ of size " + std::to_string(plan.g_plus));
  }
  if (m_s_minus > plan.g_minus) {
    throw DataError("requested " + std::to_string(m_s_minus) + " samples from G- of size " +
                    std::to_string(plan.g_minus));
  }
  plan.k_ratio = static_cast<double>(plan.g_minus) / static_cast<double>(plan.g_plus);
  return plan;
}

/// Uniform sampling without replacement inside each group. Output lists the
/// G+ draws first, then the G- draws, each in population order.
inline std::vector<JudgedSample> stratified_sample(std::span<const ScoredItem> population, const SamplingPlan& plan,
                                                   std::uint64_t seed) {
  std::vector<std::size_t> plus, minus;
  for (std::size_t i = 0; i < population.size(); ++i) {
    (group_of(population[i].score_s, plan.cutoff_s) == Group::kSPlus ? plus : minus).push_back(i);
  }
  if (plan.m_s_plus > plus.size() || plan.m_s_minus > minus.size()) {
    throw DataError("sampling plan requests more items than a group holds");
  }
  Rng rng(seed);
  auto draw = [&](std::vector<std::size_t>& pool, std::size_t m) {
    // Partial Fisher-Yates: the first m slots become a uniform subset.
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(uniform_index(rng, pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    std::sort(pool.begin(), pool.end());
  };
  draw(plus, plan.m_s_plus);
  draw(minus, plan.m_s_minus);
  std::vector<JudgedSample> out;
  out.reserve(plus.size() + minus.size());
  for (auto* pool : {&plus, &minus}) {
    const Group g = pool == &plus ? Group::kSPlus : Group::kSMinus;
    for (std::size_t i : *pool) {
      const auto& item = population[i];
      out.push_back({item.id, item.score_s, item.score_f, item.gold, g});
    }
  }
  return out;
}

/// Confusion of the judged samples with psi_f positive iff score_f >= threshold_f.
inline AdjustedConfusion confusion_at(std::span<const JudgedSample> samples, double threshold_f, double beta) {
  AdjustedConfusion c;
  c.beta = beta;
  for (const auto& s : samples) {
    const bool f_pos = s.score_f >= threshold_f;
    const bool s_pos = s.group == Group::kSPlus;
    if (s.gold == 1) {
      (s_pos ? (f_pos ? c.p_sp_fp : c.p_sp_fn) : (f_pos ? c.p_sn_fp : c.p_sn_fn)) += 1;
    } else {
      (s_pos ? (f_pos ? c.n_sp_fp : c.n_sp_fn) : (f_pos ? c.n_sn_fp : c.n_sn_fn)) += 1;
    }
  }
  return c;
}

}  // namespace hmclf::eval
