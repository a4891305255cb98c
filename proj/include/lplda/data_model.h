// lplda/data_model.h

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

#ifndef LPLDA_DATA_MODEL_H_
#define LPLDA_DATA_MODEL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lplda/common.h"

namespace lplda {

/// One i-vector with its identifiers. (conv_id, slot) names a local
/// participant; several records may share it.
struct UtteranceRecord {
  std::string utt_id;
  std::string conv_id;
  uint32_t slot = 0;
  std::optional<std::string> global_spk;
  Vector vector;
};

struct Dataset {
  int dim = 0;
  std::vector<UtteranceRecord> records;

  /// Throws Error if records disagree with `dim`, carry non-finite values,
  /// repeat an utt_id, or use a conv_id containing ':' or ','.
  void Validate() const;

  /// utt_id -> position in `records`.
  std::unordered_map<std::string, size_t> Index() const;
};

enum class LabelStrategy { kGlobal, kLocal, kPooled };

const char *StrategyName(LabelStrategy s);
LabelStrategy ParseStrategy(const std::string &name);

struct LabelClass {
  std::string id;
  std::vector<std::string> members;  // utt_ids
};

/// A partition of (a subset of) a dataset's utterances into speaker classes.
/// Classes appear in order of first occurrence in the source dataset, which
/// fixes the summation order used downstream.
struct LabelView {
  LabelStrategy strategy = LabelStrategy::kGlobal;
  std::vector<LabelClass> classes;

  size_t NumMembers() const;
};

/// Canonical local class id "conv_id:slot".
std::string LocalClassId(const std::string &conv_id, uint32_t slot);

/// One class per distinct global speaker. Throws LabelingError naming the
/// first record without a global label.
LabelView BuildGlobalView(const Dataset &data);

/// One class per (conversation, slot); global labels are ignored.
LabelView BuildLocalView(const Dataset &data);

/// Disjoint union with class ids prefixed "g:" and "l:". Throws PoolingError
/// listing utt_ids present in both views.
LabelView BuildPooledView(const LabelView &global_part, const LabelView &local_part);

/// Concatenates datasets whose utt_ids are disjoint (throws PoolingError
/// otherwise). Used to back a pooled view with a single record store.
Dataset ConcatDatasets(const Dataset &a, const Dataset &b);

/// Text format:
///   #dim=<d>
///   utt_id,conv_id,slot,global_spk,v1,...,vd      (global_spk may be "-")
Dataset ReadDataset(const std::string &path);
void WriteDataset(const Dataset &data, const std::string &path);

}  // namespace lplda

#endif  // LPLDA_DATA_MODEL_H_
