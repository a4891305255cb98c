// lplda/synth.h

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

#ifndef LPLDA_SYNTH_H_
#define LPLDA_SYNTH_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lplda/common.h"
#include "lplda/data_model.h"
#include "lplda/plda.h"

namespace lplda {

struct SynthConfig {
  int dim = 50;
  int latent_dim = 10;
  uint64_t seed = 0;
  size_t n_conversations = 1;
  size_t slots_per_conversation = 1;
  size_t utts_per_slot = 1;
  /// Probability that a slot is filled by a previously used speaker.
  double recurrence = 0.0;
  /// Generate from this model instead of sampling one.
  std::optional<PldaModel> truth;
  /// Prepended to conversation and speaker ids so that independently
  /// generated corpora never share identifiers.
  std::string id_prefix;

  /// Throws ConfigError on zero counts, rho outside [0, 1] or q > d.
  void Validate() const;
};

/// Bookkeeping collected while generating, used by tests as an oracle.
struct SynthStats {
  size_t total_slots = 0;
  size_t returning_slots = 0;   // slots filled by an already used speaker
  size_t distinct_speakers = 0;
};

/// u = 0, Sigma = A^T A / d + 0.5 I, V Gaussian and rescaled so that
/// trace(V V^T) = trace(Sigma).
PldaModel SampleTruth(const SynthConfig &cfg);

/// Conversation simulator.  Records always carry the true global speaker.
/// When cfg.truth is empty the model is SampleTruth(cfg), drawn from the
/// same random stream.
Dataset SampleConversations(const SynthConfig &cfg, SynthStats *stats = nullptr);

struct EvalSplit {
  /// Enrollment utterances; global_spk holds the model id.
  Dataset enroll;
  Dataset test;
  /// Speakers skipped for having too few utterances.
  size_t excluded_speakers = 0;
};

/// Per speaker, shuffles its utterances and takes the first n_enroll for
/// enrollment and the next n_test for testing.
EvalSplit SplitEval(const Dataset &data, size_t n_enroll_per_spk,
                    size_t n_test_per_spk, uint64_t seed);

/// Groups enrollment records by model id (their global_spk).
std::map<std::string, std::vector<Vector>> GroupEnrollment(const Dataset &enroll);

/// Independent seed for a named sub-stream.
uint64_t DeriveSeed(uint64_t seed, uint64_t stream);

}  // namespace lplda

#endif  // LPLDA_SYNTH_H_
