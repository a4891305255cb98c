// lplda/cli.cc

// Copyright 2026  The lplda Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "lplda/cli.h"

#include <algorithm>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "lplda/data_model.h"
#include "lplda/eval.h"
#include "lplda/plda.h"
#include "lplda/preprocess.h"
#include "lplda/synth.h"

namespace lplda {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  // synth
  int dim = 50;
  int latent = 10;
  size_t conversations = 1000;
  size_t slots = 2;
  size_t utts = 2;
  double recurrence = 0.05;
  size_t eval_speakers = 300;
  // shared
  uint64_t seed = 0;
  int threads = 1;
  bool no_whiten = false;
  std::string out, model, enroll, test, key, report, scores, prefix;
  // train
  std::vector<std::string> data;
  std::string labels;
  int q = -1;
  int iters = 50;
  // sweep
  std::vector<size_t> grid_global, grid_local;
  size_t repeats = 5;
};

// "corpus.csv" -> "corpus.truth.plda"
std::string TruthPath(const std::string &out) {
  std::string stem = out;
  if (stem.size() > 4 && stem.compare(stem.size() - 4, 4, ".csv") == 0)
    stem.resize(stem.size() - 4);
  return stem + ".truth.plda";
}

void CheckDistinct(const std::vector<std::string> &inputs,
                   const std::vector<std::string> &outputs) {
  std::set<std::string> seen;
  for (const std::string &p : outputs) {
    if (p.empty()) continue;
    if (!seen.insert(p).second) throw UsageError("output path given twice: " + p);
    if (std::find(inputs.begin(), inputs.end(), p) != inputs.end())
      throw UsageError("path is both read and written: " + p);
  }
}

int RunSynth(const Options &o) {
  bool want_eval = !o.enroll.empty() || !o.test.empty() || !o.key.empty();
  if (want_eval && (o.enroll.empty() || o.test.empty() || o.key.empty()))
    throw UsageError("--enroll, --test and --key must be given together");
  std::string truth_path = TruthPath(o.out);
  CheckDistinct({}, {o.out, truth_path, o.enroll, o.test, o.key});

  SynthConfig cfg;
  cfg.dim = o.dim;
  cfg.latent_dim = o.latent;
  cfg.seed = o.seed;
  cfg.n_conversations = o.conversations;
  cfg.slots_per_conversation = o.slots;
  cfg.utts_per_slot = o.utts;
  cfg.recurrence = o.recurrence;
  cfg.id_prefix = o.prefix;
  SynthStats stats;
  Dataset corpus = SampleConversations(cfg, &stats);
  PldaModel truth = SampleTruth(cfg);
  WriteDataset(corpus, o.out);
  SaveModel(truth, Preprocessor::Identity(o.dim), truth_path);
  std::cerr << "synth: " << corpus.records.size() << " utterances, "
            << stats.total_slots << " slots, " << stats.distinct_speakers
            << " distinct speakers, " << stats.returning_slots << " returning slots\n";

  if (want_eval) {
    EvalSplit split = SampleEvalSplit(truth, o.eval_speakers, 1, 3, DeriveSeed(o.seed, 3), "e");
    EvalSet eval = MakeEvalSet(split.enroll, split.test);
    WriteDataset(split.enroll, o.enroll);
    WriteDataset(split.test, o.test);
    WriteKey(eval.trials, o.key);
    std::cerr << "synth: evaluation set of " << eval.trials.model_ids.size() << " models, "
              << split.test.records.size() << " test utterances, "
              << eval.trials.trials.size() << " trials\n";
  }
  return 0;
}

int RunTrain(const Options &o) {
  CheckDistinct(o.data, {o.model});
  LabelStrategy strategy;
  try {
    strategy = ParseStrategy(o.labels);
  } catch (const ConfigError &e) {
    throw UsageError(e.what());
  }
  size_t expected = strategy == LabelStrategy::kPooled ? 2 : 1;
  if (o.data.size() != expected)
    throw UsageError(std::string("--labels ") + o.labels + " takes " +
                     std::to_string(expected) + " --data file(s)" +
                     (expected == 2 ? " (global set, then local set)" : ""));

  Dataset train;
  LabelView view;
  if (strategy == LabelStrategy::kPooled) {
    Dataset global = ReadDataset(o.data[0]);
    Dataset local = ReadDataset(o.data[1]);
    view = BuildPooledView(BuildGlobalView(global), BuildLocalView(local));
    train = ConcatDatasets(global, local);
  } else {
    train = ReadDataset(o.data[0]);
    view = strategy == LabelStrategy::kGlobal ? BuildGlobalView(train) : BuildLocalView(train);
  }
  std::vector<Vector> raw;
  raw.reserve(train.records.size());
  for (const UtteranceRecord &rec : train.records) raw.push_back(rec.vector);
  Preprocessor pp = Preprocessor::Fit(raw, !o.no_whiten);

  TrainConfig cfg;
  cfg.latent_dim = o.q >= 0 ? o.q : train.dim / 2;
  cfg.iterations = o.iters;
  cfg.seed = o.seed;
  TrainResult result = TrainEm(train, view, &pp, cfg);
  std::cerr << "train: " << StrategyName(strategy) << " labels, " << result.num_classes
            << " classes, " << result.num_vectors << " vectors, q=" << cfg.latent_dim << '\n';
  for (size_t i = 0; i < result.loglik.size(); i++)
    std::cerr << "train: iter " << i << " loglik " << FormatReal(result.loglik[i]) << '\n';
  SaveModel(result.model, pp, o.model);
  return 0;
}

// Loads model, enrollment and test vectors, preprocessed with the model's
// preprocessor.
struct ScoringInputs {
  ModelFile model;
  std::map<std::string, std::vector<Vector>> enroll;
  std::unordered_map<std::string, Vector> test;
  Dataset test_data;
};

ScoringInputs LoadScoringInputs(const Options &o) {
  ScoringInputs in{LoadModel(o.model), {}, {}, {}};
  Dataset enroll = ReadDataset(o.enroll);
  in.test_data = ReadDataset(o.test);
  for (const auto &[id, vectors] : GroupEnrollment(enroll))
    for (const Vector &v : vectors) in.enroll[id].push_back(in.model.pp.LengthNormalize(v));
  for (const UtteranceRecord &rec : in.test_data.records)
    in.test.emplace(rec.utt_id, in.model.pp.LengthNormalize(rec.vector));
  return in;
}

int RunScore(const Options &o) {
  CheckDistinct({o.model, o.enroll, o.test, o.key}, {o.scores});
  ScoringInputs in = LoadScoringInputs(o);
  TrialSet trials;
  if (!o.key.empty()) {
    trials = ReadKey(o.key);
  } else {
    for (const auto &kv : in.enroll) trials.model_ids.push_back(kv.first);
    for (const UtteranceRecord &rec : in.test_data.records) trials.test_ids.push_back(rec.utt_id);
    for (size_t m = 0; m < trials.model_ids.size(); m++)
      for (size_t t = 0; t < trials.test_ids.size(); t++) {
        const auto &spk = in.test_data.records[t].global_spk;
        trials.trials.push_back(Trial{static_cast<uint32_t>(m), static_cast<uint32_t>(t),
                                      spk && *spk == trials.model_ids[m]});
      }
  }
  std::vector<double> scores = ScoreBatch(in.model.model, in.enroll, in.test, trials, o.threads);
  WriteScores(trials, scores, o.scores);
  std::cerr << "score: " << scores.size() << " trials scored\n";
  return 0;
}

int RunEval(const Options &o) {
  std::string scores_path = o.scores.empty() ? o.report + ".scores.csv" : o.scores;
  CheckDistinct({o.model, o.enroll, o.test, o.key}, {o.report, scores_path});
  ScoringInputs in = LoadScoringInputs(o);
  TrialSet trials = ReadKey(o.key);
  std::vector<double> scores = ScoreBatch(in.model.model, in.enroll, in.test, trials, o.threads);
  WriteScores(trials, scores, scores_path);
  EvalReport report = MakeReport(trials, std::move(scores));
  report.scores_path = scores_path;
  WriteReport(report, o.report);
  std::cerr << "eval: EER " << FormatReal(100.0 * report.eer) << "% over "
            << report.n_target << " target and " << report.n_nontarget
            << " nontarget trials\n";
  return 0;
}

int RunSweepCommand(const Options &o) {
  CheckDistinct({}, {o.out});
  SweepConfig cfg;
  cfg.axis_global = o.grid_global;
  cfg.axis_local = o.grid_local;
  cfg.repeats = o.repeats;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.corpus.dim = o.dim;
  cfg.corpus.latent_dim = o.latent;
  cfg.corpus.recurrence = o.recurrence;
  cfg.corpus.slots_per_conversation = o.slots;
  cfg.corpus.local_utts = o.utts;
  cfg.corpus.eval_speakers = o.eval_speakers;
  cfg.strategy.whiten = !o.no_whiten;
  cfg.strategy.train.latent_dim = o.q >= 0 ? o.q : o.latent;
  cfg.strategy.train.iterations = o.iters;
  SweepGrid grid = RunSweep(cfg);
  WriteGrid(grid, o.out);
  for (size_t g : grid.axis_global)
    for (size_t l : grid.axis_local)
      std::cerr << "sweep: n_global=" << g << " n_local=" << l << " mean EER "
                << FormatReal(100.0 * grid.MeanEer(g, l)) << "% (std "
                << FormatReal(100.0 * grid.StdEer(g, l)) << "%)\n";
  return 0;
}

}  // namespace

int RunCli(const std::vector<std::string> &args) {
  CLI::App app{"lplda: PLDA training with global, local and pooled speaker labels"};
  app.require_subcommand(1);
  Options o;

  CLI::App *synth = app.add_subcommand("synth", "generate a synthetic conversation corpus");
  synth->add_option("--dim", o.dim, "i-vector dimension")->required();
  synth->add_option("--latent", o.latent, "speaker subspace dimension")->required();
  synth->add_option("--conversations", o.conversations, "number of conversations");
  synth->add_option("--slots", o.slots, "participants per conversation");
  synth->add_option("--utts", o.utts, "utterances per participant");
  synth->add_option("--recurrence", o.recurrence, "probability a participant is a returning speaker");
  synth->add_option("--seed", o.seed, "random seed");
  synth->add_option("--prefix", o.prefix, "prefix for generated utterance, conversation and speaker ids");
  synth->add_option("--out", o.out, "corpus file; the truth model goes to <out>.truth.plda")->required();
  synth->add_option("--enroll", o.enroll, "also write an evaluation enrollment set");
  synth->add_option("--test", o.test, "evaluation test set");
  synth->add_option("--key", o.key, "evaluation trial key");
  synth->add_option("--eval-speakers", o.eval_speakers, "speakers in the evaluation set");

  CLI::App *train = app.add_subcommand("train", "train a PLDA model");
  train->add_option("--data", o.data, "training set(s); pooled takes global then local")
      ->required()->expected(1, 2);
  train->add_option("--labels", o.labels, "global | local | pooled")->required();
  train->add_option("--q", o.q, "latent dimension (default dim/2)");
  train->add_option("--iters", o.iters, "EM iterations");
  train->add_option("--seed", o.seed, "random seed");
  train->add_option("--model", o.model, "output model file")->required();
  train->add_flag("--no-whiten", o.no_whiten, "length-normalize without whitening");

  CLI::App *score = app.add_subcommand("score", "score enrollment models against test utterances");
  score->add_option("--model", o.model, "model file")->required();
  score->add_option("--enroll", o.enroll, "enrollment set (global_spk column = model id)")->required();
  score->add_option("--test", o.test, "test set")->required();
  score->add_option("--key", o.key, "restrict scoring to the trials of this key file");
  score->add_option("--scores", o.scores, "output scores file")->required();
  score->add_option("--threads", o.threads, "worker threads");

  CLI::App *eval = app.add_subcommand("eval", "score a keyed trial list and report the EER");
  eval->add_option("--model", o.model, "model file")->required();
  eval->add_option("--enroll", o.enroll, "enrollment set")->required();
  eval->add_option("--test", o.test, "test set")->required();
  eval->add_option("--key", o.key, "trial key file")->required();
  eval->add_option("--report", o.report, "output report CSV")->required();
  eval->add_option("--scores", o.scores, "output scores file (default <report>.scores.csv)");
  eval->add_option("--threads", o.threads, "worker threads");

  CLI::App *sweep = app.add_subcommand("sweep", "EER over global/local speaker counts");
  sweep->add_option("--grid-global", o.grid_global, "global speaker counts")
      ->required()->delimiter(',');
  sweep->add_option("--grid-local", o.grid_local, "local slot counts")
      ->required()->delimiter(',');
  sweep->add_option("--repeats", o.repeats, "seeds per cell");
  sweep->add_option("--seed", o.seed, "base seed");
  sweep->add_option("--dim", o.dim, "i-vector dimension");
  sweep->add_option("--latent", o.latent, "true speaker subspace dimension");
  sweep->add_option("--q", o.q, "trained latent dimension (default --latent)");
  sweep->add_option("--iters", o.iters, "EM iterations");
  sweep->add_option("--recurrence", o.recurrence, "speaker recurrence in the local corpus");
  sweep->add_option("--slots", o.slots, "participants per local conversation");
  sweep->add_option("--utts", o.utts, "utterances per local participant");
  sweep->add_option("--eval-speakers", o.eval_speakers, "speakers in the evaluation set");
  sweep->add_option("--threads", o.threads, "worker threads");
  sweep->add_option("--out", o.out, "output grid CSV")->required();
  sweep->add_flag("--no-whiten", o.no_whiten, "length-normalize without whitening");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << "lplda: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*synth) return RunSynth(o);
    if (*train) return RunTrain(o);
    if (*score) return RunScore(o);
    if (*eval) return RunEval(o);
    return RunSweepCommand(o);
  } catch (const UsageError &e) {
    std::cerr << "lplda: " << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "lplda: error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace lplda
