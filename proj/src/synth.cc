// lplda/synth.cc

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

#include "lplda/synth.h"

#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

namespace lplda {

namespace {

std::string Numbered(const std::string &prefix, char kind, size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%06zu", kind, index);
  return prefix + buf;
}

PldaModel SampleTruth(Rng &rng, const SynthConfig &cfg) {
  const int d = cfg.dim, q = cfg.latent_dim;
  Matrix a = rng.NormalMatrix(d, d);
  Matrix sigma = a.transpose() * a / static_cast<double>(d);
  sigma.diagonal().array() += 0.5;
  sigma = 0.5 * (sigma + sigma.transpose());
  Matrix v = rng.NormalMatrix(d, q, 1.0 / std::sqrt(std::sqrt(static_cast<double>(q))));
  if (q > 0) {
    double between = v.squaredNorm();  // trace(V V^T)
    v *= std::sqrt(sigma.trace() / between);
  }
  return PldaModel(Vector::Zero(d), std::move(v), std::move(sigma));
}

}  // namespace

void SynthConfig::Validate() const {
  if (dim <= 0) throw ConfigError("synth: dim must be positive");
  if (latent_dim < 0 || latent_dim > dim)
    throw ConfigError("synth: latent dimension must be in [0, dim]");
  if (n_conversations == 0 || slots_per_conversation == 0 || utts_per_slot == 0)
    throw ConfigError("synth: conversation, slot and utterance counts must be >= 1");
  if (!(recurrence >= 0.0 && recurrence <= 1.0))
    throw ConfigError("synth: recurrence must lie in [0, 1]");
  if (truth && truth->Dim() != dim)
    throw ConfigError("synth: ground-truth model dimension differs from dim");
}

uint64_t DeriveSeed(uint64_t seed, uint64_t stream) {
  // splitmix64 finalizer over the pair.
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

PldaModel SampleTruth(const SynthConfig &cfg) {
  cfg.Validate();
  Rng rng(cfg.seed);
  return SampleTruth(rng, cfg);
}

Dataset SampleConversations(const SynthConfig &cfg, SynthStats *stats) {
  cfg.Validate();
  Rng rng(cfg.seed);
  const PldaModel truth = cfg.truth ? *cfg.truth : SampleTruth(rng, cfg);
  const int d = truth.Dim(), q = truth.LatentDim();
  const Matrix residual_sqrt = truth.ResidualCholesky().matrixL();

  Dataset data;
  data.dim = d;
  data.records.reserve(cfg.n_conversations * cfg.slots_per_conversation * cfg.utts_per_slot);
  std::vector<Vector> speaker_means;  // u + V y per speaker
  SynthStats local_stats;

  for (size_t c = 0; c < cfg.n_conversations; c++) {
    std::string conv_id = Numbered(cfg.id_prefix, 'c', c);
    std::unordered_set<size_t> in_conversation;
    for (size_t slot = 0; slot < cfg.slots_per_conversation; slot++) {
      local_stats.total_slots++;
      size_t speaker = speaker_means.size();
      bool returning = false;
      if (!speaker_means.empty() && rng.Uniform() < cfg.recurrence) {
        for (int attempt = 0; attempt < 100; attempt++) {
          size_t candidate = rng.Index(speaker_means.size());
          if (!in_conversation.count(candidate)) {
            speaker = candidate;
            returning = true;
            break;
          }
        }
      }
      if (!returning) {
        Vector y = rng.NormalVector(q);
        speaker_means.push_back(truth.Mean() + truth.SpeakerBasis() * y);
      } else {
        local_stats.returning_slots++;
      }
      in_conversation.insert(speaker);
      std::string spk_id = Numbered(cfg.id_prefix, 's', speaker);
      for (size_t k = 0; k < cfg.utts_per_slot; k++) {
        UtteranceRecord rec;
        rec.utt_id = conv_id + "-" + std::to_string(slot) + "-" + std::to_string(k);
        rec.conv_id = conv_id;
        rec.slot = static_cast<uint32_t>(slot);
        rec.global_spk = spk_id;
        rec.vector = speaker_means[speaker] + residual_sqrt * rng.NormalVector(d);
        data.records.push_back(std::move(rec));
      }
    }
  }
  local_stats.distinct_speakers = speaker_means.size();
  if (stats) *stats = local_stats;
  return data;
}

EvalSplit SplitEval(const Dataset &data, size_t n_enroll_per_spk,
                    size_t n_test_per_spk, uint64_t seed) {
  if (n_enroll_per_spk == 0 || n_test_per_spk == 0)
    throw ConfigError("split_eval: enroll and test counts must be >= 1");
  LabelView speakers = BuildGlobalView(data);
  std::unordered_map<std::string, size_t> index = data.Index();
  Rng rng(seed);
  EvalSplit split;
  split.enroll.dim = data.dim;
  split.test.dim = data.dim;
  const size_t need = n_enroll_per_spk + n_test_per_spk;
  for (LabelClass &spk : speakers.classes) {
    if (spk.members.size() < need) {
      split.excluded_speakers++;
      continue;
    }
    std::vector<std::string> &utts = spk.members;
    for (size_t i = utts.size() - 1; i > 0; i--) std::swap(utts[i], utts[rng.Index(i + 1)]);
    for (size_t i = 0; i < need; i++) {
      const UtteranceRecord &rec = data.records[index.at(utts[i])];
      (i < n_enroll_per_spk ? split.enroll : split.test).records.push_back(rec);
    }
  }
  return split;
}

std::map<std::string, std::vector<Vector>> GroupEnrollment(const Dataset &enroll) {
  std::map<std::string, std::vector<Vector>> models;
  for (const UtteranceRecord &rec : enroll.records) {
    if (!rec.global_spk)
      throw LabelingError("enrollment utterance " + rec.utt_id + " has no model id");
    models[*rec.global_spk].push_back(rec.vector);
  }
  return models;
}

}  // namespace lplda
