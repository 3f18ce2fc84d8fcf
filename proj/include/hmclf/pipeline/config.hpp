#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hmclf/pipeline/datasets.hpp"
#include "hmclf/pipeline/dedup.hpp"
#include "hmclf/pipeline/synth.hpp"
#include "hmclf/text/sequence_spec.hpp"

namespace hmclf::pipeline {

struct VocabSizes {
  std::size_t words_freq = 5000;
  std::size_t words_chi = 5000;
  std::size_t trigrams_freq = 3000;
  std::size_t trigrams_chi = 3000;
  std::size_t names_freq = 2000;
  std::size_t names_chi = 2000;
  std::size_t salutation_freq = 2000;
  std::size_t salutation_chi = 2000;
};

struct TrainConfig {
  std::size_t sub_epochs = 4;
  std::size_t full_epochs = 4;
  std::size_t batch_size = 128;
  double learning_rate = 0.001;
  /// Per-model optimizer step limit; 0 means unlimited.
  std::size_t max_steps = 0;
  double q = 0.99;
  double content_dropout = 0.4;
  double sender_dropout = 0.6;
  double action_dropout = 0.4;
  double salutation_dropout = 0.6;
};

struct EvalConfig {
  double cutoff_s = 0.5;
  /// Judged-sample sizes per group; 0 takes the whole group.
  std::size_t sample_s_plus = 0;
  std::size_t sample_s_minus = 2000;
  std::vector<double> targets{0.90, 0.96};
};

/// Every tunable of the pipeline. Defaults are the desk-scale settings.
struct PipelineConfig {
  std::uint64_t seed = 0;
  SynthSpec synth;
  std::size_t per_day_cap = kDefaultPerDayCap;
  std::size_t action_window_days = 3;
  std::size_t hard_example_copies = 10;
  double val_fraction = 0.1;
  double test_fraction = 0.1;
  VocabSizes vocab;
  text::SequenceSpec sequence;
  TrainConfig train;
  EvalConfig eval;
  std::size_t threads = 1;

  /// Vocabulary sizes and batch size used on the production corpus.
  static PipelineConfig paper_scale() {
    PipelineConfig c;
    c.vocab.words_freq = 400000;
    c.vocab.words_chi = 400000;
    c.train.batch_size = 128;
    c.train.learning_rate = 0.001;
    return c;
  }

  AssembleOptions assemble_options(std::vector<std::string> hard_ids = {}) const {
    AssembleOptions o;
    o.action_window_days = action_window_days;
    o.hard_example_copies = hard_example_copies;
    o.hard_example_ids = std::move(hard_ids);
    o.seed = derive_seed(seed, "assemble");
    return o;
  }

  nlohmann::json training_json() const {
    return {{"seed", seed},
            {"batch_size", train.batch_size},
            {"learning_rate", train.learning_rate},
            {"sub_epochs", train.sub_epochs},
            {"full_epochs", train.full_epochs},
            {"max_steps", train.max_steps},
            {"val_fraction", val_fraction},
            {"test_fraction", test_fraction}};
  }
};

}  // namespace hmclf::pipeline
