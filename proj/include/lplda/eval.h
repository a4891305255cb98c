// lplda/eval.h

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

#ifndef LPLDA_EVAL_H_
#define LPLDA_EVAL_H_

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "lplda/common.h"
#include "lplda/data_model.h"
#include "lplda/plda.h"
#include "lplda/synth.h"
#include "lplda/trials.h"

namespace lplda {

/// Full cross product of models x test utterances.  A trial is a target iff
/// key_source[test utt] equals the model id.  Throws Error naming the first
/// test utterance missing from key_source.
TrialSet GenerateTrials(const std::vector<std::string> &model_ids,
                        const std::vector<std::string> &test_ids,
                        const std::unordered_map<std::string, std::string> &key_source);

/// Same, keyed by the test records' global_spk.
TrialSet GenerateTrials(const std::vector<std::string> &model_ids, const Dataset &test);

struct DetPoint {
  double threshold;  // scores >= threshold are accepted
  double far;        // fraction of nontargets accepted
  double frr;        // fraction of targets rejected
};

/// Operating points at every distinct score, preceded by the accept-all
/// point (threshold -inf) and followed by the reject-all point (+inf).
std::vector<DetPoint> ComputeDetCurve(const std::vector<double> &target_scores,
                                      const std::vector<double> &nontarget_scores);

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

/// EER by linear interpolation between the last operating point with
/// FRR < FAR and the first with FRR >= FAR.  Throws Error on empty lists or
/// non-finite scores.
EerResult ComputeEer(const std::vector<double> &target_scores,
                     const std::vector<double> &nontarget_scores);

/// Interpolated crossing of an already computed DET curve.
EerResult EerFromDet(const std::vector<DetPoint> &det);

struct EvalReport {
  double eer = 0.0;
  double threshold = 0.0;
  std::vector<DetPoint> det_points;
  size_t n_target = 0;
  size_t n_nontarget = 0;
  std::string scores_path;
  std::vector<double> scores;  // aligned with the trial set; not serialized
};

EvalReport MakeReport(const TrialSet &trials, std::vector<double> scores);

/// A fixed evaluation protocol: raw enrollment and test vectors plus the
/// trial list over them.
struct EvalSet {
  std::map<std::string, std::vector<Vector>> enroll;
  std::unordered_map<std::string, Vector> test;
  TrialSet trials;
};

EvalSet MakeEvalSet(const Dataset &enroll, const Dataset &test);

enum class Strategy { kCosine, kGlobal, kLocal, kPooled };

const char *StrategyLabel(Strategy s);  // "cosine", "GT", "LT", "Pool"

struct StrategyConfig {
  TrainConfig train;
  bool whiten = true;
  int threads = 1;
};

/// Scores an evaluation set with an already fitted preprocessor and either a
/// PLDA model or, when `model` is null, cosine similarity.
std::vector<double> ScoreEvalSet(const EvalSet &eval, const Preprocessor &pp,
                                 const PldaModel *model, int threads);

/// Fits the preprocessor on the strategy's training vectors, trains PLDA
/// (not for cosine) and scores the evaluation set.  Datasets not needed by
/// the strategy may be null.  Cosine fits its preprocessor on whichever
/// training sets are given.
EvalReport RunStrategy(Strategy strategy, const Dataset *global_data,
                       const Dataset *local_data, const EvalSet &eval,
                       const StrategyConfig &cfg);

/// Synthetic benchmark: one ground-truth model, a globally labelled set of
/// distinct speakers, a conversation corpus for local labels and a disjoint
/// evaluation population.
struct BenchmarkConfig {
  int dim = 50;
  int latent_dim = 10;
  double recurrence = 0.05;
  size_t global_speakers = 500;
  size_t global_utts = 5;
  size_t local_slots = 1500;
  size_t slots_per_conversation = 2;
  size_t local_utts = 2;
  size_t eval_speakers = 300;
  size_t enroll_per_speaker = 1;
  size_t test_per_speaker = 3;
};

struct Benchmark {
  PldaModel truth;
  Dataset global;
  Dataset local;
  Dataset enroll;
  Dataset test;
};

Benchmark MakeBenchmark(const BenchmarkConfig &cfg, uint64_t seed);

/// Globally labelled speakers drawn from `truth` (one per conversation).
Dataset SampleGlobalSet(const PldaModel &truth, size_t speakers, size_t utts,
                        uint64_t seed, const std::string &prefix);
/// Conversation corpus with about `slots` participant slots.
Dataset SampleLocalSet(const PldaModel &truth, size_t slots, size_t slots_per_conversation,
                       size_t utts, double recurrence, uint64_t seed,
                       const std::string &prefix);
/// Evaluation split over `speakers` fresh speakers.
EvalSplit SampleEvalSplit(const PldaModel &truth, size_t speakers, size_t n_enroll,
                          size_t n_test, uint64_t seed, const std::string &prefix);

struct SweepEntry {
  size_t n_global = 0;
  size_t n_local = 0;
  uint64_t seed = 0;
  double eer = 0.0;
};

struct SweepGrid {
  std::vector<size_t> axis_global;
  std::vector<size_t> axis_local;
  size_t repeats = 0;
  /// Row-major over (global, local), repeats innermost.
  std::vector<SweepEntry> entries;

  double MeanEer(size_t n_global, size_t n_local) const;
  double StdEer(size_t n_global, size_t n_local) const;
};

struct SweepConfig {
  std::vector<size_t> axis_global;
  std::vector<size_t> axis_local;
  size_t repeats = 5;
  uint64_t seed = 0;
  BenchmarkConfig corpus;  // global/local sizes are taken from the axes
  StrategyConfig strategy;
  int threads = 1;

  void Validate() const;
};

/// For every (g, l) cell and repeat: subsample g global speakers and l local
/// slots from the repeat's pools, train (GT when l == 0, LT when g == 0,
/// pooled otherwise) and evaluate on one fixed trial set.
SweepGrid RunSweep(const SweepConfig &cfg);

/// Report CSV: "metric,value" rows, a blank line, then "far,frr" rows.
void WriteReport(const EvalReport &report, const std::string &path);
EvalReport ReadReport(const std::string &path);

/// Grid CSV: "n_global,n_local,seed,eer".
void WriteGrid(const SweepGrid &grid, const std::string &path);
std::vector<SweepEntry> ReadGrid(const std::string &path);

/// "model_id,test_utt_id,score" with header.
void WriteScores(const TrialSet &trials, const std::vector<double> &scores,
                 const std::string &path);
/// "model_id,test_utt_id,target|nontarget" with header.
void WriteKey(const TrialSet &trials, const std::string &path);
TrialSet ReadKey(const std::string &path);

}  // namespace lplda

#endif  // LPLDA_EVAL_H_
