#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>

#include "hmclf/eval/sampling.hpp"

namespace hmclf::eval {

/// Binormal score model: each class draws a unit-variance latent score whose
/// mean places the model at the requested operating point when the latent
/// threshold is 0. Scores are Phi(latent), so the operating threshold is 0.5.
struct OperatingPoint {
  double precision = 0.9;
  double recall = 0.8;
};

struct PopulationSpec {
  std::size_t size = 100000;
  double prior = 0.05;  ///< positive-class fraction
  OperatingPoint f;     ///< evaluated model psi_f
  OperatingPoint s;     ///< sampling model psi_s
  double correlation = 0.5;  ///< latent correlation of psi_s with psi_f within a class
  std::uint64_t seed = 0;
};

/// Standard normal quantile and CDF extended to the endpoints 0/1 and +-inf.
inline double unit_quantile(double u) {
  if (u <= 0.0) return -std::numeric_limits<double>::infinity();
  if (u >= 1.0) return std::numeric_limits<double>::infinity();
  return boost::math::quantile(boost::math::normal_distribution<double>(), u);
}

inline double unit_cdf(double x) {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  return boost::math::cdf(boost::math::normal_distribution<double>(), x);
}

struct ClassMeans {
  double positive;
  double negative;
};

/// Latent means realising (precision, recall) at prior pi: recall = Phi(mu+),
/// false-positive rate = recall * pi * (1 - precision) / (precision * (1 - pi)) = Phi(mu-).
/// Precision 1 and recall 1 give infinite means, i.e. a perfect model.
inline ClassMeans latent_means(const OperatingPoint& op, double prior) {
  if (!(op.recall > 0.0 && op.recall <= 1.0) || !(op.precision > 0.0 && op.precision <= 1.0)) {
    throw UsageError("operating point must lie in (0, 1]");
  }
  const double fpr = op.recall * prior * (1.0 - op.precision) / (op.precision * (1.0 - prior));
  if (!(fpr >= 0.0 && fpr < 1.0)) throw UsageError("operating point is infeasible at this prior");
  return {unit_quantile(op.recall), unit_quantile(fpr)};
}

/// Generates a labeled population scored by both models. Within each class
/// the psi_f latents are stratified quantiles of N(mu, 1) in random order, so
/// the realised operating point matches the requested one up to O(1/n).
inline std::vector<ScoredItem> simulate_population(const PopulationSpec& spec) {
  if (!(spec.prior > 0.0 && spec.prior < 1.0)) throw UsageError("prior must lie in (0, 1)");
  if (!(spec.correlation >= -1.0 && spec.correlation <= 1.0)) throw UsageError("correlation outside [-1, 1]");
  const auto mf = latent_means(spec.f, spec.prior);
  const auto ms = latent_means(spec.s, spec.prior);
  Rng rng(derive_seed(spec.seed, "population"));

  const auto n_pos = static_cast<std::size_t>(std::llround(spec.prior * static_cast<double>(spec.size)));
  std::vector<int> labels(spec.size, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_pos), 1);
  shuffle(labels.begin(), labels.end(), rng);

  auto stratified = [&](std::size_t n) {
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (static_cast<double>(i) + uniform01(rng)) / static_cast<double>(n);
      z[i] = unit_quantile(std::clamp(u, 1e-300, 1.0 - 1e-16));
    }
    shuffle(z.begin(), z.end(), rng);
    return z;
  };
  const std::size_t counts[2] = {spec.size - n_pos, n_pos};
  std::vector<double> zf[2], ze[2];
  for (int c = 0; c < 2; ++c) {
    zf[c] = stratified(counts[c]);
    ze[c] = stratified(counts[c]);
  }

  const double rho = spec.correlation;
  const double rest = std::sqrt(1.0 - rho * rho);
  std::size_t next[2] = {0, 0};
  std::vector<ScoredItem> out(spec.size);
  for (std::size_t i = 0; i < spec.size; ++i) {
    const int c = labels[i];
    const std::size_t k = next[c]++;
    const double zf_i = zf[c][k];
    const double zs_i = rho * zf_i + rest * ze[c][k];
    out[i].id = "p" + std::to_string(i);
    out[i].gold = c;
    out[i].score_f = unit_cdf((c ? mf.positive : mf.negative) + zf_i);
    out[i].score_s = unit_cdf((c ? ms.positive : ms.negative) + zs_i);
  }
  return out;
}

/// Population precision and recall of psi_f at `threshold_f`.
inline Metrics population_metrics(std::span<const ScoredItem> population, double threshold_f) {
  double tp = 0, fp = 0, fn = 0;
  for (const auto& item : population) {
    const bool pred = item.score_f >= threshold_f;
    if (item.gold == 1) (pred ? tp : fn) += 1;
    else if (pred) fp += 1;
  }
  return {safe_ratio(tp, tp + fp), safe_ratio(tp, tp + fn)};
}

}  // namespace hmclf::eval
