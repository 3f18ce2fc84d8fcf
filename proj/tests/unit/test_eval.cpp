#include <gtest/gtest.h>

#include <cmath>

#include "hmclf/eval/adjusted.hpp"
#include "hmclf/eval/sampling.hpp"
#include "hmclf/eval/simulator.hpp"
#include "hmclf/eval/sweep.hpp"

using namespace hmclf;
using namespace hmclf::eval;

namespace {

AdjustedConfusion random_confusion(Rng& rng, double beta) {
  AdjustedConfusion c;
  for (auto* v : {&c.p_sp_fp, &c.p_sp_fn, &c.p_sn_fp, &c.p_sn_fn, &c.n_sp_fp, &c.n_sp_fn, &c.n_sn_fp, &c.n_sn_fn}) {
    *v = 1 + uniform_index(rng, 500);
  }
  c.beta = beta;
  return c;
}

std::vector<JudgedSample> random_judged(Rng& rng, std::size_t n, double signal) {
  std::vector<JudgedSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    JudgedSample s;
    s.message_id = "j" + std::to_string(i);
    s.gold = uniform01(rng) < 0.3 ? 1 : 0;
    s.score_f = std::round((uniform01(rng) + signal * s.gold) * 50.0) / 50.0;  // coarse grid forces ties
    s.score_s = uniform01(rng);
    s.group = uniform01(rng) < 0.5 ? Group::kSPlus : Group::kSMinus;
    out.push_back(s);
  }
  return out;
}

/// Every distinct threshold evaluated from scratch through the confusion counts.
RecallAtPrecision brute_force_rap(const std::vector<JudgedSample>& samples, double beta, double target) {
  std::vector<double> thresholds;
  for (const auto& s : samples) thresholds.push_back(s.score_f);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  RecallAtPrecision best;
  for (auto it = thresholds.rbegin(); it != thresholds.rend(); ++it) {
    const auto m = adjusted_metrics(confusion_at(samples, *it, beta));
    if (m.precision && *m.precision >= target && (!best.threshold || *m.recall > best.recall)) {
      best = {*m.recall, m.precision, *it};
    }
  }
  return best;
}

PopulationSpec table_spec() {
  PopulationSpec spec;
  spec.size = 100000;
  spec.prior = 0.05;
  spec.f = {0.96, 0.788};
  spec.s = {0.80, 0.85};
  spec.correlation = 0.6;
  spec.seed = 17;
  return spec;
}

}  // namespace

TEST(AdjustedMetrics, HandComputed) {
  AdjustedConfusion c{10, 5, 2, 3, 4, 100, 1, 400, 2.0};
  const auto m = adjusted_metrics(c);
  EXPECT_DOUBLE_EQ(*m.precision, (10.0 + 2 * 2.0) / (10.0 + 4.0 + 2 * 2.0 + 2 * 1.0));
  EXPECT_DOUBLE_EQ(*m.recall, (10.0 + 2 * 2.0) / (10.0 + 5.0 + 2 * 2.0 + 2 * 3.0));
  EXPECT_EQ(c.total(), 525u);
}

TEST(AdjustedMetrics, BetaOneEqualsPooled) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = random_confusion(rng, 1.0);
    const auto adj = adjusted_metrics(c);
    const double tp = static_cast<double>(c.p_sp_fp + c.p_sn_fp);
    const double fp = static_cast<double>(c.n_sp_fp + c.n_sn_fp);
    const double fn = static_cast<double>(c.p_sp_fn + c.p_sn_fn);
    EXPECT_NEAR(*adj.precision, tp / (tp + fp), 1e-12);
    EXPECT_NEAR(*adj.recall, tp / (tp + fn), 1e-12);
  }
}

TEST(AdjustedMetrics, SameModelsKeepPrecision) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    auto c = random_confusion(rng, 0.5 + 9.5 * uniform01(rng));
    c.p_sn_fp = c.n_sn_fp = 0;  // psi_s == psi_f: nothing in s- is predicted positive
    EXPECT_NEAR(*adjusted_metrics(c).precision, *unadjusted_metrics(c).precision, 1e-12);
  }
}

TEST(AdjustedMetrics, EmptyDenominatorsAreUndefined) {
  AdjustedConfusion c;
  c.n_sn_fn = 10;
  const auto m = adjusted_metrics(c);
  EXPECT_FALSE(m.precision.has_value());
  EXPECT_FALSE(m.recall.has_value());
  c.beta = 0.0;
  EXPECT_THROW(adjusted_metrics(c), UsageError);
}

TEST(AdjustedMetrics, BetaWarningRange) {
  EXPECT_FALSE(beta_warning(1.0));
  EXPECT_FALSE(beta_warning(10.0));
  EXPECT_TRUE(beta_warning(0.5));
  EXPECT_TRUE(beta_warning(12.0));
}

TEST(Sampling, WholePopulationPlanIsExact) {
  const auto pop = simulate_population([] {
    auto s = table_spec();
    s.size = 5000;
    return s;
  }());
  const auto plan = make_plan(pop, 0.5, 0, 0);
  const auto full = make_plan(pop, 0.5, plan.g_plus, plan.g_minus);
  EXPECT_DOUBLE_EQ(full.beta(), 1.0);
  const auto sample = stratified_sample(pop, full, 3);
  EXPECT_EQ(sample.size(), pop.size());
  const auto adj = adjusted_metrics(confusion_at(sample, 0.5, full.beta()));
  const auto truth = population_metrics(pop, 0.5);
  EXPECT_EQ(*adj.precision, *truth.precision);
  EXPECT_EQ(*adj.recall, *truth.recall);
}

TEST(Sampling, SeedDeterministicAndBoundsChecked) {
  const auto pop = simulate_population([] {
    auto s = table_spec();
    s.size = 3000;
    return s;
  }());
  const auto plan = make_plan(pop, 0.5, 50, 200);
  EXPECT_EQ(stratified_sample(pop, plan, 9), stratified_sample(pop, plan, 9));
  EXPECT_NE(stratified_sample(pop, plan, 9), stratified_sample(pop, plan, 10));
  EXPECT_THROW(make_plan(pop, 0.5, plan.g_plus + 1, 1), DataError);
  auto bad = plan;
  bad.m_s_minus = plan.g_minus + 1;
  EXPECT_THROW(stratified_sample(pop, bad, 1), DataError);
  std::set<std::string> ids;
  for (const auto& s : stratified_sample(pop, plan, 9)) EXPECT_TRUE(ids.insert(s.message_id).second);
}

TEST(Sampling, BetaEqualsRatioOfSamplingRates) {
  const auto pop = simulate_population([] {
    auto s = table_spec();
    s.size = 20000;
    return s;
  }());
  const auto plan = make_plan(pop, 0.5, 300, 700);
  EXPECT_NEAR(plan.beta(), plan.r() / plan.r_prime(), 1e-12);
}

TEST(Sampling, GroupFractionWithinBinomialNoise) {
  std::vector<ScoredItem> pop;
  for (int i = 0; i < 100; ++i) pop.push_back({"a" + std::to_string(i), 0.9, 0.9, i < 80 ? 1 : 0});
  for (int i = 0; i < 400; ++i) pop.push_back({"b" + std::to_string(i), 0.1, 0.1, 0});
  const auto plan = make_plan(pop, 0.5, 50, 10);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto sample = stratified_sample(pop, plan, seed);
    double humans = 0;
    for (const auto& s : sample)
      if (s.group == Group::kSPlus) humans += s.gold;
    // Hypergeometric sd of the count: sqrt(50 * .8 * .2 * 50 / 99) ~ 2.0.
    EXPECT_NEAR(humans, 40.0, 4 * 2.01);
  }
}

TEST(Sampling, StratumCountsMatchExpectation) {
  const auto pop = simulate_population(table_spec());
  const auto plan = make_plan(pop, 0.5, 2000, 2000);
  // n_{i,j} per sampling group, expected sample count n * r (or r').
  std::array<std::array<double, 4>, 2> pop_counts{}, sample_counts{};
  auto cell = [](int gold, bool f_pos) { return static_cast<std::size_t>(gold * 2 + (f_pos ? 1 : 0)); };
  for (const auto& item : pop) {
    pop_counts[item.score_s >= 0.5 ? 0 : 1][cell(item.gold, item.score_f >= 0.5)] += 1;
  }
  const int runs = 20;
  for (int run = 0; run < runs; ++run) {
    for (const auto& s : stratified_sample(pop, plan, 100 + run)) {
      sample_counts[s.group == Group::kSPlus ? 0 : 1][cell(s.gold, s.score_f >= 0.5)] += 1.0 / runs;
    }
  }
  for (int g = 0; g < 2; ++g) {
    const double rate = g == 0 ? plan.r() : plan.r_prime();
    for (std::size_t k = 0; k < 4; ++k) {
      const double expected = pop_counts[g][k] * rate;
      const double sd = std::sqrt(expected * (1.0 - rate) / runs) + 1e-9;
      EXPECT_NEAR(sample_counts[g][k], expected, 4.0 * sd + 0.05) << "group " << g << " cell " << k;
    }
  }
}

TEST(Sweep, PerfectScorerRecallsEverything) {
  std::vector<JudgedSample> samples;
  for (int i = 0; i < 20; ++i) samples.push_back({"x" + std::to_string(i), 0.0, i < 5 ? 0.9 + i * 0.01 : 0.1, i < 5 ? 1 : 0, i % 2 ? Group::kSPlus : Group::kSMinus});
  for (double target : {0.5, 0.9, 1.0}) {
    const auto r = recall_at_precision(samples, 3.0, target);
    EXPECT_DOUBLE_EQ(r.recall, 1.0);
    EXPECT_DOUBLE_EQ(*r.threshold, 0.9);
  }
}

TEST(Sweep, MatchesBruteForceOracle) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto samples = random_judged(rng, 300, 0.6);
    const double beta = 1.0 + 5.0 * uniform01(rng);
    for (double target : {0.9, 0.96, 0.7}) {
      const auto fast = recall_at_precision(samples, beta, target);
      const auto slow = brute_force_rap(samples, beta, target);
      EXPECT_EQ(fast.threshold.has_value(), slow.threshold.has_value());
      if (fast.threshold) {
        EXPECT_NEAR(fast.recall, slow.recall, 1e-12);
        EXPECT_EQ(*fast.threshold, *slow.threshold);
      }
    }
  }
}

TEST(Sweep, RandomScorerFindsNothingAtHighPrecision) {
  Rng rng(5);
  std::vector<JudgedSample> samples;
  for (int i = 0; i < 2000; ++i) samples.push_back({"r" + std::to_string(i), 0.0, uniform01(rng), i % 2, Group::kSPlus});
  const auto r = recall_at_precision(samples, 1.0, 0.99);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_FALSE(r.threshold.has_value());
}

TEST(Sweep, InvariantUnderMonotoneTransform) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    auto samples = random_judged(rng, 200, 0.5);
    const auto before = recall_at_precision(samples, 2.5, 0.9);
    for (auto& s : samples) s.score_f = std::exp(3.0 * s.score_f) - 7.0;
    const auto after = recall_at_precision(samples, 2.5, 0.9);
    EXPECT_EQ(before.recall, after.recall);
    EXPECT_EQ(before.threshold.has_value(), after.threshold.has_value());
    if (before.threshold) EXPECT_EQ(std::exp(3.0 * *before.threshold) - 7.0, *after.threshold);
  }
}

TEST(Sweep, LoweringThresholdNeverLowersRecall) {
  Rng rng(7);
  const auto samples = random_judged(rng, 500, 0.4);
  double last = -1.0;
  for (double t = 1.5; t >= -0.01; t -= 0.02) {
    const double recall = *unadjusted_metrics(confusion_at(samples, t, 1.0)).recall;
    EXPECT_GE(recall, last);
    last = recall;
  }
}

TEST(Sweep, RequiresAPositive) {
  std::vector<JudgedSample> samples = {{"a", 0, 0.4, 0, Group::kSPlus}};
  EXPECT_THROW(recall_at_precision(samples, 1.0, 0.9), DataError);
}

TEST(Simulator, PerfectModelIsPerfect) {
  auto spec = table_spec();
  spec.size = 10000;
  spec.f = {1.0, 1.0};
  const auto pop = simulate_population(spec);
  const auto m = population_metrics(pop, 0.5);
  EXPECT_EQ(*m.precision, 1.0);
  EXPECT_EQ(*m.recall, 1.0);
}

TEST(Simulator, ReproducesConfiguredOperatingPoint) {
  const auto pop = simulate_population(table_spec());
  std::size_t positives = 0;
  for (const auto& item : pop) positives += item.gold;
  EXPECT_EQ(positives, 5000u);
  const auto m = population_metrics(pop, 0.5);
  EXPECT_NEAR(*m.precision, 0.96, 0.005 * 0.96);
  EXPECT_NEAR(*m.recall, 0.788, 0.005 * 0.788);
  EXPECT_EQ(simulate_population(table_spec())[123].score_f, pop[123].score_f);
}

TEST(Simulator, AdjustedEstimatesConvergeWithSampleSize) {
  const auto pop = simulate_population(table_spec());
  const auto truth = population_metrics(pop, 0.5);
  double last_error = 1e9;
  for (std::size_t m : {200u, 2000u, 20000u}) {
    const auto plan = make_plan(pop, 0.5, std::min<std::size_t>(m, make_plan(pop, 0.5, 0, 0).g_plus), m);
    double err = 0.0;
    const int runs = 30;
    for (int run = 0; run < runs; ++run) {
      const auto adj = adjusted_metrics(confusion_at(stratified_sample(pop, plan, 1000 + run), 0.5, plan.beta()));
      err += std::abs(*adj.recall - *truth.recall) + std::abs(*adj.precision - *truth.precision);
    }
    err /= runs;
    EXPECT_LT(err, last_error) << "sample size " << m;
    last_error = err;
  }
}
