// lplda/eval.cc

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

#include "lplda/eval.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_set>

namespace lplda {

size_t TrialSet::NumTargets() const {
  size_t n = 0;
  for (const Trial &t : trials) n += t.target;
  return n;
}

void TrialSet::Validate() const {
  std::unordered_set<std::string> seen(model_ids.begin(), model_ids.end());
  if (seen.size() != model_ids.size()) throw Error("trial set has duplicate model ids");
  seen = std::unordered_set<std::string>(test_ids.begin(), test_ids.end());
  if (seen.size() != test_ids.size()) throw Error("trial set has duplicate test ids");
  std::unordered_set<uint64_t> pairs;
  pairs.reserve(trials.size());
  for (const Trial &t : trials) {
    if (t.model >= model_ids.size() || t.test >= test_ids.size())
      throw Error("trial refers to an unknown model or test index");
    if (!pairs.insert((static_cast<uint64_t>(t.model) << 32) | t.test).second)
      throw Error("duplicate trial " + model_ids[t.model] + "," + test_ids[t.test]);
  }
}

TrialSet GenerateTrials(const std::vector<std::string> &model_ids,
                        const std::vector<std::string> &test_ids,
                        const std::unordered_map<std::string, std::string> &key_source) {
  if (model_ids.size() > UINT32_MAX || test_ids.size() > UINT32_MAX)
    throw Error("too many models or test utterances for one trial set");
  std::vector<const std::string *> test_speaker(test_ids.size());
  for (size_t t = 0; t < test_ids.size(); t++) {
    auto it = key_source.find(test_ids[t]);
    if (it == key_source.end())
      throw Error("test utterance " + test_ids[t] + " has no true speaker");
    test_speaker[t] = &it->second;
  }
  TrialSet set;
  set.model_ids = model_ids;
  set.test_ids = test_ids;
  set.trials.reserve(model_ids.size() * test_ids.size());
  for (size_t m = 0; m < model_ids.size(); m++)
    for (size_t t = 0; t < test_ids.size(); t++)
      set.trials.push_back(Trial{static_cast<uint32_t>(m), static_cast<uint32_t>(t),
                                 *test_speaker[t] == model_ids[m]});
  return set;
}

TrialSet GenerateTrials(const std::vector<std::string> &model_ids, const Dataset &test) {
  std::vector<std::string> test_ids;
  std::unordered_map<std::string, std::string> keys;
  for (const UtteranceRecord &rec : test.records) {
    test_ids.push_back(rec.utt_id);
    if (rec.global_spk) keys.emplace(rec.utt_id, *rec.global_spk);
  }
  return GenerateTrials(model_ids, test_ids, keys);
}

std::vector<DetPoint> ComputeDetCurve(const std::vector<double> &target_scores,
                                      const std::vector<double> &nontarget_scores) {
  if (target_scores.empty() || nontarget_scores.empty())
    throw Error("EER needs at least one target and one nontarget score");
  for (const auto *list : {&target_scores, &nontarget_scores})
    for (double s : *list)
      if (!std::isfinite(s)) throw Error("non-finite score in EER computation");

  std::vector<double> tar(target_scores), non(nontarget_scores);
  std::sort(tar.begin(), tar.end());
  std::sort(non.begin(), non.end());
  const double nt = static_cast<double>(tar.size()), nn = static_cast<double>(non.size());
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<DetPoint> det;
  det.reserve(tar.size() + non.size() + 2);
  det.push_back({-inf, 1.0, 0.0});
  size_t ti = 0, ni = 0;  // counts of scores strictly below the threshold
  while (ti < tar.size() || ni < non.size()) {
    double t = std::min(ti < tar.size() ? tar[ti] : inf, ni < non.size() ? non[ni] : inf);
    det.push_back({t, static_cast<double>(non.size() - ni) / nn,
                   static_cast<double>(ti) / nt});
    while (ti < tar.size() && tar[ti] == t) ti++;
    while (ni < non.size() && non[ni] == t) ni++;
  }
  det.push_back({inf, 0.0, 1.0});
  return det;
}

EerResult EerFromDet(const std::vector<DetPoint> &det) {
  size_t k = 1;
  while (k < det.size() && det[k].frr < det[k].far) k++;
  if (k >= det.size()) throw Error("DET curve never crosses the diagonal");
  const DetPoint &a = det[k - 1], &b = det[k];
  double da = a.frr - a.far, db = b.frr - b.far;
  double alpha = -da / (db - da);
  EerResult r;
  r.eer = a.far + alpha * (b.far - a.far);
  double ta = std::isfinite(a.threshold) ? a.threshold : b.threshold;
  double tb = std::isfinite(b.threshold) ? b.threshold : a.threshold;
  r.threshold = ta + alpha * (tb - ta);
  return r;
}

EerResult ComputeEer(const std::vector<double> &target_scores,
                     const std::vector<double> &nontarget_scores) {
  return EerFromDet(ComputeDetCurve(target_scores, nontarget_scores));
}

EvalReport MakeReport(const TrialSet &trials, std::vector<double> scores) {
  if (scores.size() != trials.trials.size())
    throw Error("score count does not match trial count");
  std::vector<double> tar, non;
  for (size_t i = 0; i < scores.size(); i++)
    (trials.trials[i].target ? tar : non).push_back(scores[i]);
  EvalReport report;
  report.det_points = ComputeDetCurve(tar, non);
  EerResult eer = EerFromDet(report.det_points);
  report.eer = eer.eer;
  report.threshold = eer.threshold;
  report.n_target = tar.size();
  report.n_nontarget = non.size();
  report.scores = std::move(scores);
  return report;
}

EvalSet MakeEvalSet(const Dataset &enroll, const Dataset &test) {
  EvalSet eval;
  eval.enroll = GroupEnrollment(enroll);
  std::vector<std::string> model_ids;
  for (const auto &kv : eval.enroll) model_ids.push_back(kv.first);
  for (const UtteranceRecord &rec : test.records)
    if (!eval.test.emplace(rec.utt_id, rec.vector).second)
      throw Error("duplicate test utterance " + rec.utt_id);
  eval.trials = GenerateTrials(model_ids, test);
  return eval;
}

const char *StrategyLabel(Strategy s) {
  switch (s) {
    case Strategy::kCosine: return "cosine";
    case Strategy::kGlobal: return "GT";
    case Strategy::kLocal: return "LT";
    case Strategy::kPooled: return "Pool";
  }
  return "?";
}

std::vector<double> ScoreEvalSet(const EvalSet &eval, const Preprocessor &pp,
                                 const PldaModel *model, int threads) {
  std::map<std::string, std::vector<Vector>> enroll;
  for (const auto &[id, vectors] : eval.enroll) {
    std::vector<Vector> &out = enroll[id];
    for (const Vector &v : vectors) out.push_back(pp.LengthNormalize(v));
  }
  std::unordered_map<std::string, Vector> test;
  for (const auto &[id, v] : eval.test) test.emplace(id, pp.LengthNormalize(v));
  if (model) return ScoreBatch(*model, enroll, test, eval.trials, threads);

  // Cosine against the average of the normalized enrollment vectors.
  const TrialSet &trials = eval.trials;
  std::vector<Vector> model_vecs(trials.model_ids.size());
  for (size_t m = 0; m < trials.model_ids.size(); m++) {
    auto it = enroll.find(trials.model_ids[m]);
    if (it == enroll.end() || it->second.empty())
      throw Error("no enrollment vectors for model " + trials.model_ids[m]);
    Vector sum = Vector::Zero(pp.Dim());
    for (const Vector &v : it->second) sum += v;
    model_vecs[m] = sum;
  }
  std::vector<const Vector *> test_vecs(trials.test_ids.size());
  for (size_t t = 0; t < trials.test_ids.size(); t++) {
    auto it = test.find(trials.test_ids[t]);
    if (it == test.end()) throw Error("no test vector for utterance " + trials.test_ids[t]);
    test_vecs[t] = &it->second;
  }
  std::vector<double> scores(trials.trials.size());
  ParallelFor(scores.size(), threads, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; i++)
      scores[i] = CosineScore(model_vecs[trials.trials[i].model],
                              *test_vecs[trials.trials[i].test]);
  });
  return scores;
}

namespace {

std::vector<Vector> AllVectors(std::initializer_list<const Dataset *> sets) {
  std::vector<Vector> out;
  for (const Dataset *d : sets)
    if (d)
      for (const UtteranceRecord &rec : d->records) out.push_back(rec.vector);
  return out;
}

}  // namespace

EvalReport RunStrategy(Strategy strategy, const Dataset *global_data,
                       const Dataset *local_data, const EvalSet &eval,
                       const StrategyConfig &cfg) {
  auto require = [strategy](const Dataset *d, const char *what) {
    if (!d || d->records.empty())
      throw ConfigError(std::string("strategy ") + StrategyLabel(strategy) + " needs " + what);
  };
  if (strategy == Strategy::kCosine) {
    std::vector<Vector> train = AllVectors({global_data, local_data});
    Preprocessor pp = Preprocessor::Fit(train, cfg.whiten);
    return MakeReport(eval.trials, ScoreEvalSet(eval, pp, nullptr, cfg.threads));
  }

  Dataset train;
  LabelView view;
  switch (strategy) {
    case Strategy::kGlobal:
      require(global_data, "a globally labelled set");
      train = *global_data;
      view = BuildGlobalView(train);
      break;
    case Strategy::kLocal:
      require(local_data, "a conversation-labelled set");
      train = *local_data;
      view = BuildLocalView(train);
      break;
    default:
      require(global_data, "a globally labelled set");
      require(local_data, "a conversation-labelled set");
      train = ConcatDatasets(*global_data, *local_data);
      view = BuildPooledView(BuildGlobalView(*global_data), BuildLocalView(*local_data));
      break;
  }
  Preprocessor pp = Preprocessor::Fit(AllVectors({&train}), cfg.whiten);
  TrainResult trained = TrainEm(train, view, &pp, cfg.train);
  return MakeReport(eval.trials, ScoreEvalSet(eval, pp, &trained.model, cfg.threads));
}

Dataset SampleGlobalSet(const PldaModel &truth, size_t speakers, size_t utts,
                        uint64_t seed, const std::string &prefix) {
  SynthConfig cfg;
  cfg.dim = truth.Dim();
  cfg.latent_dim = truth.LatentDim();
  cfg.seed = seed;
  cfg.n_conversations = speakers;
  cfg.slots_per_conversation = 1;
  cfg.utts_per_slot = utts;
  cfg.recurrence = 0.0;
  cfg.truth = truth;
  cfg.id_prefix = prefix;
  return SampleConversations(cfg);
}

Dataset SampleLocalSet(const PldaModel &truth, size_t slots, size_t slots_per_conversation,
                       size_t utts, double recurrence, uint64_t seed,
                       const std::string &prefix) {
  SynthConfig cfg;
  cfg.dim = truth.Dim();
  cfg.latent_dim = truth.LatentDim();
  cfg.seed = seed;
  cfg.slots_per_conversation = slots_per_conversation;
  cfg.n_conversations = (slots + slots_per_conversation - 1) / std::max<size_t>(1, slots_per_conversation);
  cfg.utts_per_slot = utts;
  cfg.recurrence = recurrence;
  cfg.truth = truth;
  cfg.id_prefix = prefix;
  return SampleConversations(cfg);
}

EvalSplit SampleEvalSplit(const PldaModel &truth, size_t speakers, size_t n_enroll,
                          size_t n_test, uint64_t seed, const std::string &prefix) {
  Dataset pool = SampleGlobalSet(truth, speakers, n_enroll + n_test, seed, prefix);
  return SplitEval(pool, n_enroll, n_test, DeriveSeed(seed, 1));
}

Benchmark MakeBenchmark(const BenchmarkConfig &cfg, uint64_t seed) {
  SynthConfig truth_cfg;
  truth_cfg.dim = cfg.dim;
  truth_cfg.latent_dim = cfg.latent_dim;
  truth_cfg.seed = DeriveSeed(seed, 0);
  Benchmark b{SampleTruth(truth_cfg), {}, {}, {}, {}};
  b.global = SampleGlobalSet(b.truth, cfg.global_speakers, cfg.global_utts,
                             DeriveSeed(seed, 1), "g");
  b.local = SampleLocalSet(b.truth, cfg.local_slots, cfg.slots_per_conversation,
                           cfg.local_utts, cfg.recurrence, DeriveSeed(seed, 2), "l");
  EvalSplit split = SampleEvalSplit(b.truth, cfg.eval_speakers, cfg.enroll_per_speaker,
                                    cfg.test_per_speaker, DeriveSeed(seed, 3), "e");
  b.enroll = std::move(split.enroll);
  b.test = std::move(split.test);
  return b;
}

double SweepGrid::MeanEer(size_t n_global, size_t n_local) const {
  double sum = 0.0;
  size_t n = 0;
  for (const SweepEntry &e : entries)
    if (e.n_global == n_global && e.n_local == n_local) {
      sum += e.eer;
      n++;
    }
  if (n == 0) throw Error("no sweep cell for the requested counts");
  return sum / static_cast<double>(n);
}

double SweepGrid::StdEer(size_t n_global, size_t n_local) const {
  double mean = MeanEer(n_global, n_local), ss = 0.0;
  size_t n = 0;
  for (const SweepEntry &e : entries)
    if (e.n_global == n_global && e.n_local == n_local) {
      ss += (e.eer - mean) * (e.eer - mean);
      n++;
    }
  return n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
}

void SweepConfig::Validate() const {
  if (axis_global.empty() || axis_local.empty())
    throw ConfigError("sweep axes must be non-empty");
  if (repeats == 0) throw ConfigError("sweep needs at least one repeat");
  bool zero_g = std::count(axis_global.begin(), axis_global.end(), 0u) > 0;
  bool zero_l = std::count(axis_local.begin(), axis_local.end(), 0u) > 0;
  if (zero_g && zero_l)
    throw ConfigError("sweep cell (n_global=0, n_local=0) has no training data");
}

SweepGrid RunSweep(const SweepConfig &cfg) {
  cfg.Validate();
  const BenchmarkConfig &corpus = cfg.corpus;
  SynthConfig truth_cfg;
  truth_cfg.dim = corpus.dim;
  truth_cfg.latent_dim = corpus.latent_dim;
  truth_cfg.seed = DeriveSeed(cfg.seed, 0);
  const PldaModel truth = SampleTruth(truth_cfg);
  EvalSplit split = SampleEvalSplit(truth, corpus.eval_speakers, corpus.enroll_per_speaker,
                                    corpus.test_per_speaker, DeriveSeed(cfg.seed, 3), "e");
  const EvalSet eval = MakeEvalSet(split.enroll, split.test);

  const size_t max_g = *std::max_element(cfg.axis_global.begin(), cfg.axis_global.end());
  const size_t max_l = *std::max_element(cfg.axis_local.begin(), cfg.axis_local.end());

  // Per repeat: class pools in a seeded random order; cells take prefixes.
  struct Pools {
    uint64_t seed;
    std::vector<std::vector<Vector>> global;
    std::vector<std::vector<Vector>> local;
  };
  auto ordered_classes = [](const Dataset &data, const LabelView &view, uint64_t seed) {
    std::unordered_map<std::string, size_t> index = data.Index();
    std::vector<std::vector<Vector>> classes;
    for (const LabelClass &c : view.classes) {
      std::vector<Vector> members;
      for (const std::string &u : c.members) members.push_back(data.records[index.at(u)].vector);
      classes.push_back(std::move(members));
    }
    Rng rng(seed);
    for (size_t i = classes.size(); i > 1; i--) std::swap(classes[i - 1], classes[rng.Index(i)]);
    return classes;
  };
  std::vector<Pools> pools;
  for (size_t r = 0; r < cfg.repeats; r++) {
    Pools p;
    p.seed = cfg.seed + r;
    if (max_g > 0) {
      Dataset g = SampleGlobalSet(truth, max_g, corpus.global_utts, DeriveSeed(p.seed, 1), "g");
      p.global = ordered_classes(g, BuildGlobalView(g), DeriveSeed(p.seed, 4));
    }
    if (max_l > 0) {
      Dataset l = SampleLocalSet(truth, max_l, corpus.slots_per_conversation, corpus.local_utts,
                                 corpus.recurrence, DeriveSeed(p.seed, 2), "l");
      p.local = ordered_classes(l, BuildLocalView(l), DeriveSeed(p.seed, 5));
    }
    pools.push_back(std::move(p));
  }

  SweepGrid grid;
  grid.axis_global = cfg.axis_global;
  grid.axis_local = cfg.axis_local;
  grid.repeats = cfg.repeats;
  const size_t num_jobs = cfg.axis_global.size() * cfg.axis_local.size() * cfg.repeats;
  grid.entries.resize(num_jobs);
  ParallelFor(num_jobs, cfg.threads, [&](size_t begin, size_t end) {
    for (size_t job = begin; job < end; job++) {
      size_t r = job % cfg.repeats;
      size_t cell = job / cfg.repeats;
      size_t g = cfg.axis_global[cell / cfg.axis_local.size()];
      size_t l = cfg.axis_local[cell % cfg.axis_local.size()];
      const Pools &p = pools[r];

      std::vector<const std::vector<Vector> *> chosen;
      for (size_t i = 0; i < g; i++) chosen.push_back(&p.global[i]);
      for (size_t i = 0; i < l && i < p.local.size(); i++) chosen.push_back(&p.local[i]);
      if (chosen.empty())
        throw ConfigError("sweep cell (" + std::to_string(g) + ", " + std::to_string(l) +
                          ") has no training classes");
      std::vector<Vector> raw;
      for (const auto *c : chosen) raw.insert(raw.end(), c->begin(), c->end());
      Preprocessor pp = Preprocessor::Fit(raw, cfg.strategy.whiten);
      std::vector<std::vector<Vector>> classes;
      classes.reserve(chosen.size());
      for (const auto *c : chosen) {
        std::vector<Vector> normed;
        for (const Vector &v : *c) normed.push_back(pp.LengthNormalize(v));
        classes.push_back(std::move(normed));
      }
      TrainConfig train = cfg.strategy.train;
      train.seed = DeriveSeed(p.seed, 6);
      TrainResult trained = TrainEm(classes, train);
      std::vector<double> scores = ScoreEvalSet(eval, pp, &trained.model, 1);
      EvalReport report = MakeReport(eval.trials, std::move(scores));
      grid.entries[job] = SweepEntry{g, l, p.seed, report.eer};
    }
  });
  return grid;
}

namespace {

std::ofstream OpenForWrite(const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  return os;
}

[[noreturn]] void CsvFail(const std::string &path, size_t line, const std::string &what) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

void WriteReport(const EvalReport &report, const std::string &path) {
  std::ofstream os = OpenForWrite(path);
  os << "metric,value\n";
  os << "eer," << FormatReal(report.eer) << '\n';
  os << "threshold," << FormatReal(report.threshold) << '\n';
  os << "n_target," << report.n_target << '\n';
  os << "n_nontarget," << report.n_nontarget << '\n';
  os << "n_trials," << report.n_target + report.n_nontarget << '\n';
  if (!report.scores_path.empty()) os << "scores_path," << report.scores_path << '\n';
  os << "\nfar,frr\n";
  for (const DetPoint &p : report.det_points)
    os << FormatReal(p.far) << ',' << FormatReal(p.frr) << '\n';
  if (!os) throw Error("error writing " + path);
}

EvalReport ReadReport(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open report " + path);
  EvalReport report;
  std::string line;
  size_t line_no = 0;
  if (!std::getline(is, line) || line != "metric,value") CsvFail(path, 1, "expected 'metric,value'");
  line_no++;
  while (std::getline(is, line)) {
    line_no++;
    if (line.empty()) break;
    auto f = SplitFields(line, ',');
    if (f.size() != 2) CsvFail(path, line_no, "expected two fields");
    double value = 0.0;
    uint64_t count = 0;
    if (f[0] == "scores_path") {
      report.scores_path = std::string(f[1]);
    } else if (f[0] == "eer" || f[0] == "threshold") {
      if (!ParseReal(f[1], &value)) CsvFail(path, line_no, "bad number");
      (f[0] == "eer" ? report.eer : report.threshold) = value;
    } else if (f[0] == "n_target" || f[0] == "n_nontarget" || f[0] == "n_trials") {
      if (!ParseUint(f[1], &count)) CsvFail(path, line_no, "bad count");
      if (f[0] == "n_target") report.n_target = count;
      if (f[0] == "n_nontarget") report.n_nontarget = count;
    } else {
      CsvFail(path, line_no, "unknown metric '" + std::string(f[0]) + "'");
    }
  }
  if (!std::getline(is, line) || line != "far,frr") CsvFail(path, line_no + 1, "expected 'far,frr'");
  line_no++;
  while (std::getline(is, line)) {
    line_no++;
    auto f = SplitFields(line, ',');
    DetPoint p{0.0, 0.0, 0.0};
    if (f.size() != 2 || !ParseReal(f[0], &p.far) || !ParseReal(f[1], &p.frr))
      CsvFail(path, line_no, "bad DET point");
    report.det_points.push_back(p);
  }
  return report;
}

void WriteGrid(const SweepGrid &grid, const std::string &path) {
  std::ofstream os = OpenForWrite(path);
  os << "n_global,n_local,seed,eer\n";
  for (const SweepEntry &e : grid.entries)
    os << e.n_global << ',' << e.n_local << ',' << e.seed << ',' << FormatReal(e.eer) << '\n';
  if (!os) throw Error("error writing " + path);
}

std::vector<SweepEntry> ReadGrid(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open grid " + path);
  std::string line;
  if (!std::getline(is, line) || line != "n_global,n_local,seed,eer")
    CsvFail(path, 1, "expected 'n_global,n_local,seed,eer'");
  std::vector<SweepEntry> out;
  size_t line_no = 1;
  while (std::getline(is, line)) {
    line_no++;
    auto f = SplitFields(line, ',');
    uint64_t g, l, s;
    SweepEntry e;
    if (f.size() != 4 || !ParseUint(f[0], &g) || !ParseUint(f[1], &l) || !ParseUint(f[2], &s) ||
        !ParseReal(f[3], &e.eer))
      CsvFail(path, line_no, "malformed grid row");
    e.n_global = g;
    e.n_local = l;
    e.seed = s;
    out.push_back(e);
  }
  return out;
}

void WriteScores(const TrialSet &trials, const std::vector<double> &scores,
                 const std::string &path) {
  if (scores.size() != trials.trials.size()) throw Error("score count does not match trials");
  std::ofstream os = OpenForWrite(path);
  os << "model_id,test_utt_id,score\n";
  for (size_t i = 0; i < scores.size(); i++) {
    const Trial &t = trials.trials[i];
    os << trials.model_ids[t.model] << ',' << trials.test_ids[t.test] << ','
       << FormatReal(scores[i]) << '\n';
  }
  if (!os) throw Error("error writing " + path);
}

void WriteKey(const TrialSet &trials, const std::string &path) {
  std::ofstream os = OpenForWrite(path);
  os << "model_id,test_utt_id,key\n";
  for (const Trial &t : trials.trials)
    os << trials.model_ids[t.model] << ',' << trials.test_ids[t.test] << ','
       << (t.target ? "target" : "nontarget") << '\n';
  if (!os) throw Error("error writing " + path);
}

TrialSet ReadKey(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open key file " + path);
  TrialSet set;
  std::unordered_map<std::string, uint32_t> models, tests;
  auto intern = [](std::unordered_map<std::string, uint32_t> &table,
                   std::vector<std::string> &ids, std::string_view id) {
    auto [it, inserted] = table.emplace(std::string(id), static_cast<uint32_t>(ids.size()));
    if (inserted) ids.emplace_back(id);
    return it->second;
  };
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    line_no++;
    if (line.empty()) continue;
    auto f = SplitFields(line, ',');
    if (f.size() != 3) CsvFail(path, line_no, "expected model_id,test_utt_id,target|nontarget");
    if (line_no == 1 && f[0] == "model_id") continue;
    if (f[2] != "target" && f[2] != "nontarget")
      CsvFail(path, line_no, "key must be 'target' or 'nontarget'");
    Trial t;
    t.model = intern(models, set.model_ids, f[0]);
    t.test = intern(tests, set.test_ids, f[1]);
    t.target = f[2] == "target";
    set.trials.push_back(t);
  }
  set.Validate();
  return set;
}

}  // namespace lplda
