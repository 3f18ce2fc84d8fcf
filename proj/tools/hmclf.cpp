#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "hmclf/pipeline/stages.hpp"

namespace {

using namespace hmclf;
using namespace hmclf::pipeline;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kDivergence = 3 };

void add_config_options(CLI::App& app, PipelineConfig& c, std::string& preset) {
  app.add_option("--preset", preset, "Base settings: desk or paper-scale")
      ->check(CLI::IsMember({"desk", "paper-scale"}));
  app.add_option("--seed", c.seed, "Root seed for every random stream");
  app.add_option("--threads", c.threads, "Worker threads for scoring")->check(CLI::PositiveNumber);

  auto* g = "Corpus generation";
  app.add_option("--n-messages", c.synth.n_messages)->group(g);
  app.add_option("--human-fraction", c.synth.human_fraction)->group(g);
  app.add_option("--ambiguous-rate", c.synth.ambiguous_rate)->group(g);
  app.add_option("--unknown-rate", c.synth.unknown_rate)->group(g);
  app.add_option("--human-salutation-rate", c.synth.human_salutation_rate)->group(g);
  app.add_option("--machine-salutation-rate", c.synth.machine_salutation_rate)->group(g);
  app.add_option("--human-opened-only", c.synth.human_actions.opened_only)->group(g);
  app.add_option("--human-deleted-only", c.synth.human_actions.deleted_only)->group(g);
  app.add_option("--human-both", c.synth.human_actions.both)->group(g);
  app.add_option("--machine-opened-only", c.synth.machine_actions.opened_only)->group(g);
  app.add_option("--machine-deleted-only", c.synth.machine_actions.deleted_only)->group(g);
  app.add_option("--machine-both", c.synth.machine_actions.both)->group(g);
  app.add_option("--days", c.synth.days)->group(g);
  app.add_option("--start-day", c.synth.start_day)->group(g);
  app.add_option("--recipients", c.synth.recipients)->group(g);
  app.add_option("--filler-words", c.synth.filler_words)->group(g);

  g = "Training sets";
  app.add_option("--per-day-cap", c.per_day_cap)->group(g);
  app.add_option("--action-window-days", c.action_window_days)->group(g);
  app.add_option("--hard-example-copies", c.hard_example_copies)->group(g);
  app.add_option("--val-fraction", c.val_fraction)->group(g);
  app.add_option("--test-fraction", c.test_fraction)->group(g);

  g = "Vocabularies";
  app.add_option("--words-freq", c.vocab.words_freq)->group(g);
  app.add_option("--words-chi", c.vocab.words_chi)->group(g);
  app.add_option("--trigrams-freq", c.vocab.trigrams_freq)->group(g);
  app.add_option("--trigrams-chi", c.vocab.trigrams_chi)->group(g);
  app.add_option("--names-freq", c.vocab.names_freq)->group(g);
  app.add_option("--names-chi", c.vocab.names_chi)->group(g);
  app.add_option("--salutation-freq", c.vocab.salutation_freq)->group(g);
  app.add_option("--salutation-chi", c.vocab.salutation_chi)->group(g);

  g = "Sequence lengths";
  app.add_option("--subject-length", c.sequence.subject)->group(g);
  app.add_option("--content-train-length", c.sequence.content_train)->group(g);
  app.add_option("--content-infer-length", c.sequence.content_infer)->group(g);
  app.add_option("--address-length", c.sequence.address)->group(g);
  app.add_option("--name-length", c.sequence.name)->group(g);
  app.add_option("--salutation-length", c.sequence.salutation)->group(g);

  g = "Training";
  app.add_option("--sub-epochs", c.train.sub_epochs)->group(g);
  app.add_option("--full-epochs", c.train.full_epochs)->group(g);
  app.add_option("--batch-size", c.train.batch_size)->group(g);
  app.add_option("--learning-rate", c.train.learning_rate)->group(g);
  app.add_option("--max-steps", c.train.max_steps)->group(g);
  app.add_option("--q", c.train.q, "Rectification threshold")->group(g);
  app.add_option("--content-dropout", c.train.content_dropout)->group(g);
  app.add_option("--sender-dropout", c.train.sender_dropout)->group(g);
  app.add_option("--action-dropout", c.train.action_dropout)->group(g);
  app.add_option("--salutation-dropout", c.train.salutation_dropout)->group(g);

  g = "Evaluation";
  app.add_option("--cutoff-s", c.eval.cutoff_s)->group(g);
  app.add_option("--sample-s-plus", c.eval.sample_s_plus, "Judged s+ messages; 0 takes all")->group(g);
  app.add_option("--sample-s-minus", c.eval.sample_s_minus, "Judged s- messages; 0 takes all")->group(g);
  app.add_option("--targets", c.eval.targets, "Adjusted-precision targets")->group(g);
}

/// The paper-scale preset only changes values the user did not set.
void apply_preset(const CLI::App& app, const std::string& preset, PipelineConfig& c) {
  if (preset != "paper-scale") return;
  const PipelineConfig p = PipelineConfig::paper_scale();
  auto keep = [&](const char* name, auto& field, const auto& value) {
    if (app.get_option(name)->count() == 0) field = value;
  };
  keep("--words-freq", c.vocab.words_freq, p.vocab.words_freq);
  keep("--words-chi", c.vocab.words_chi, p.vocab.words_chi);
  keep("--batch-size", c.train.batch_size, p.train.batch_size);
  keep("--learning-rate", c.train.learning_rate, p.train.learning_rate);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Human/machine email classifier pipeline"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Key-value config file (key = value, keys are long flag names)");

  PipelineConfig cfg;
  std::string preset = "desk";
  add_config_options(app, cfg, preset);

  std::string corpus, out, sets, vocab, model, sampler, samples, kind = "action", hard_examples;

  auto* gen = app.add_subcommand("gen-corpus", "Write a seeded synthetic corpus");
  gen->add_option("--out", out, "Corpus file")->required();

  auto* labels = app.add_subcommand("gen-labels", "Write action or salutation weak labels");
  labels->add_option("--corpus", corpus)->required()->check(CLI::ExistingFile);
  labels->add_option("--kind", kind)->check(CLI::IsMember({"action", "salutation"}));
  labels->add_option("--out", out, "message_id<TAB>label file")->required();

  auto* assemble_cmd = app.add_subcommand("assemble", "Dedup a corpus and build the four training sets");
  assemble_cmd->add_option("--corpus", corpus)->required()->check(CLI::ExistingFile);
  assemble_cmd->add_option("--hard-examples", hard_examples, "File of message ids to duplicate")
      ->check(CLI::ExistingFile);
  assemble_cmd->add_option("--out", out, "Output directory")->required();

  auto* vocab_cmd = app.add_subcommand("build-vocab", "Build the four vocabularies from the training split");
  vocab_cmd->add_option("--sets", sets, "Directory written by assemble")->required()->check(CLI::ExistingDirectory);
  vocab_cmd->add_option("--out", out, "Output directory")->required();

  auto* train_cmd = app.add_subcommand("train", "Train the sub-models and the full model");
  train_cmd->add_option("--sets", sets)->required()->check(CLI::ExistingDirectory);
  train_cmd->add_option("--vocab", vocab)->required()->check(CLI::ExistingDirectory);
  train_cmd->add_option("--out", out, "Checkpoint directory")->required();

  auto* predict_cmd = app.add_subcommand("predict", "Score a corpus with one checkpoint");
  predict_cmd->add_option("--model", model)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--vocab", vocab)->required()->check(CLI::ExistingDirectory);
  predict_cmd->add_option("--corpus", corpus)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", out, "message_id<TAB>p_human file")->required();

  auto* eval_cmd = app.add_subcommand("evaluate", "Adjusted recall at fixed precision on a judged sample");
  eval_cmd->add_option("--sampler", sampler, "Sampling model checkpoint")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--model", model, "Evaluated model checkpoint")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--vocab", vocab)->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--corpus", corpus)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", out, "Report file (stdout if omitted)");
  eval_cmd->add_option("--samples", samples, "Judged-sample file");

  auto* report_cmd = app.add_subcommand("report", "Selectivity of the action conditions");
  report_cmd->add_option("--corpus", corpus)->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--out", out, "Report file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  apply_preset(app, preset, cfg);

  try {
    if (*gen) {
      const auto n = gen_corpus(cfg, out);
      std::cerr << "gen-corpus: wrote " << n << " records to " << out << "\n";
    } else if (*labels) {
      const auto n = gen_labels(corpus, kind, out, cfg.action_window_days);
      std::cerr << "gen-labels: wrote " << n << " " << kind << " labels to " << out << "\n";
    } else if (*assemble_cmd) {
      const auto s = assemble(cfg, corpus, out, hard_examples.empty() ? std::vector<std::string>{} : read_id_list(hard_examples));
      std::cerr << "assemble: content " << s.content.size() << ", sender " << s.sender.size() << ", action "
                << s.action.size() << ", salutation " << s.salutation.size() << "\n";
    } else if (*vocab_cmd) {
      const auto v = build_vocabs(cfg, Workspace::load(sets));
      save_vocabs(v, out);
      std::cerr << "build-vocab: words " << v.words.size() << ", trigrams " << v.trigrams.size() << ", names "
                << v.names.size() << ", salutation " << v.salutation.size() << "\n";
    } else if (*train_cmd) {
      const auto s = train_all(cfg, sets, vocab, out, &std::cerr);
      std::cerr << "train: finished in " << format_g9(s.seconds) << " s\n";
    } else if (*predict_cmd) {
      const auto r = predict_batch(model, vocab, corpus, out, cfg.threads, cfg.sequence);
      std::cerr << "predict: " << r.messages << " messages in " << format_g9(r.seconds) << " s ("
                << format_g9(r.messages_per_second) << " messages/s, " << r.threads << " threads)\n";
    } else if (*eval_cmd) {
      const auto r = evaluate(cfg, sampler, model, vocab, corpus);
      write_text(out, r.to_text());
      if (!samples.empty()) write_judged_samples(samples, r.samples);
    } else if (*report_cmd) {
      write_text(out, selectivity_text(read_corpus(corpus).records));
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DivergenceError& e) {
    std::cerr << "numeric divergence: " << e.what() << "\n";
    return kDivergence;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  }
  return kOk;
}
