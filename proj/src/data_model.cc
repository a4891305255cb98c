// lplda/data_model.cc

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

#include "lplda/data_model.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace lplda {

namespace {

bool BadIdentifier(const std::string &s) {
  return s.empty() || s == "-" || s.find(',') != std::string::npos ||
         s.find('\n') != std::string::npos || s.find('\r') != std::string::npos;
}

// Groups records by key in first-occurrence order.
template <typename KeyFn>
LabelView GroupBy(const Dataset &data, LabelStrategy strategy, KeyFn key) {
  LabelView view;
  view.strategy = strategy;
  std::unordered_map<std::string, size_t> position;
  for (const UtteranceRecord &rec : data.records) {
    std::string k = key(rec);
    auto [it, inserted] = position.emplace(k, view.classes.size());
    if (inserted) view.classes.push_back(LabelClass{std::move(k), {}});
    view.classes[it->second].members.push_back(rec.utt_id);
  }
  return view;
}

}  // namespace

void Dataset::Validate() const {
  if (dim <= 0) throw Error("dataset dimension must be positive");
  std::unordered_set<std::string> seen;
  for (const UtteranceRecord &rec : records) {
    if (BadIdentifier(rec.utt_id))
      throw Error("invalid utt_id '" + rec.utt_id + "'");
    if (BadIdentifier(rec.conv_id) || rec.conv_id.find(':') != std::string::npos)
      throw Error("invalid conv_id '" + rec.conv_id + "' for " + rec.utt_id);
    if (rec.global_spk && BadIdentifier(*rec.global_spk))
      throw Error("invalid global_spk for " + rec.utt_id);
    if (rec.vector.size() != dim)
      throw Error("utterance " + rec.utt_id + " has dimension " +
                  std::to_string(rec.vector.size()) + ", expected " +
                  std::to_string(dim));
    if (!rec.vector.allFinite())
      throw Error("utterance " + rec.utt_id + " has non-finite components");
    if (!seen.insert(rec.utt_id).second)
      throw Error("duplicate utt_id " + rec.utt_id);
  }
}

std::unordered_map<std::string, size_t> Dataset::Index() const {
  std::unordered_map<std::string, size_t> index;
  index.reserve(records.size());
  for (size_t i = 0; i < records.size(); i++) index.emplace(records[i].utt_id, i);
  return index;
}

const char *StrategyName(LabelStrategy s) {
  switch (s) {
    case LabelStrategy::kGlobal: return "global";
    case LabelStrategy::kLocal: return "local";
    case LabelStrategy::kPooled: return "pooled";
  }
  return "?";
}

LabelStrategy ParseStrategy(const std::string &name) {
  if (name == "global") return LabelStrategy::kGlobal;
  if (name == "local") return LabelStrategy::kLocal;
  if (name == "pooled") return LabelStrategy::kPooled;
  throw ConfigError("unknown label strategy '" + name + "'");
}

size_t LabelView::NumMembers() const {
  size_t n = 0;
  for (const LabelClass &c : classes) n += c.members.size();
  return n;
}

std::string LocalClassId(const std::string &conv_id, uint32_t slot) {
  return conv_id + ":" + std::to_string(slot);
}

LabelView BuildGlobalView(const Dataset &data) {
  for (const UtteranceRecord &rec : data.records)
    if (!rec.global_spk)
      throw LabelingError("utterance " + rec.utt_id + " has no global speaker label");
  return GroupBy(data, LabelStrategy::kGlobal,
                 [](const UtteranceRecord &r) { return *r.global_spk; });
}

LabelView BuildLocalView(const Dataset &data) {
  return GroupBy(data, LabelStrategy::kLocal, [](const UtteranceRecord &r) {
    return LocalClassId(r.conv_id, r.slot);
  });
}

LabelView BuildPooledView(const LabelView &global_part, const LabelView &local_part) {
  std::unordered_set<std::string> global_utts;
  for (const LabelClass &c : global_part.classes)
    global_utts.insert(c.members.begin(), c.members.end());
  std::vector<std::string> collisions;
  for (const LabelClass &c : local_part.classes)
    for (const std::string &u : c.members)
      if (global_utts.count(u)) collisions.push_back(u);
  if (!collisions.empty()) {
    std::ostringstream msg;
    msg << "cannot pool views: " << collisions.size() << " shared utt_id(s):";
    for (size_t i = 0; i < collisions.size() && i < 10; i++) msg << ' ' << collisions[i];
    if (collisions.size() > 10) msg << " ...";
    throw PoolingError(msg.str());
  }
  LabelView out;
  out.strategy = LabelStrategy::kPooled;
  out.classes.reserve(global_part.classes.size() + local_part.classes.size());
  for (const LabelClass &c : global_part.classes)
    out.classes.push_back(LabelClass{"g:" + c.id, c.members});
  for (const LabelClass &c : local_part.classes)
    out.classes.push_back(LabelClass{"l:" + c.id, c.members});
  return out;
}

Dataset ConcatDatasets(const Dataset &a, const Dataset &b) {
  if (a.records.empty()) return b;
  if (b.records.empty()) return a;
  if (a.dim != b.dim)
    throw PoolingError("cannot concatenate datasets of dimension " +
                       std::to_string(a.dim) + " and " + std::to_string(b.dim));
  std::unordered_map<std::string, size_t> index = a.Index();
  Dataset out = a;
  for (const UtteranceRecord &rec : b.records) {
    if (index.count(rec.utt_id))
      throw PoolingError("utt_id " + rec.utt_id + " present in both datasets");
    out.records.push_back(rec);
  }
  return out;
}

Dataset ReadDataset(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open dataset file " + path);
  auto fail = [&path](size_t line, const std::string &what) {
    throw ParseError(path + ":" + std::to_string(line) + ": " + what);
  };

  Dataset data;
  std::string line;
  if (!std::getline(is, line)) fail(1, "empty file, expected '#dim=<d>' header");
  uint64_t dim = 0;
  if (line.rfind("#dim=", 0) != 0 || !ParseUint(std::string_view(line).substr(5), &dim) ||
      dim == 0)
    fail(1, "expected header '#dim=<d>' with positive d");
  data.dim = static_cast<int>(dim);

  std::unordered_set<std::string> seen;
  size_t line_no = 1;
  while (std::getline(is, line)) {
    line_no++;
    if (line.empty()) continue;
    auto fields = SplitFields(line, ',');
    if (fields.size() != 4 + dim)
      fail(line_no, "expected " + std::to_string(4 + dim) + " fields (dim=" +
                        std::to_string(dim) + "), found " + std::to_string(fields.size()));
    UtteranceRecord rec;
    rec.utt_id = std::string(fields[0]);
    rec.conv_id = std::string(fields[1]);
    if (BadIdentifier(rec.utt_id)) fail(line_no, "invalid utt_id");
    if (BadIdentifier(rec.conv_id) || rec.conv_id.find(':') != std::string::npos)
      fail(line_no, "invalid conv_id '" + rec.conv_id + "' (must be non-empty, no ':')");
    uint64_t slot;
    if (!ParseUint(fields[2], &slot) || slot > UINT32_MAX)
      fail(line_no, "invalid slot '" + std::string(fields[2]) + "'");
    rec.slot = static_cast<uint32_t>(slot);
    if (fields[3] != "-") {
      if (fields[3].empty()) fail(line_no, "empty global_spk (use '-')");
      rec.global_spk = std::string(fields[3]);
    }
    rec.vector.resize(dim);
    for (uint64_t k = 0; k < dim; k++)
      if (!ParseReal(fields[4 + k], &rec.vector(k)))
        fail(line_no, "non-numeric component " + std::to_string(k + 1) + " '" +
                          std::string(fields[4 + k]) + "'");
    if (!seen.insert(rec.utt_id).second) fail(line_no, "duplicate utt_id " + rec.utt_id);
    data.records.push_back(std::move(rec));
  }
  return data;
}

void WriteDataset(const Dataset &data, const std::string &path) {
  data.Validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write dataset file " + path);
  os << "#dim=" << data.dim << '\n';
  for (const UtteranceRecord &rec : data.records) {
    os << rec.utt_id << ',' << rec.conv_id << ',' << rec.slot << ','
       << (rec.global_spk ? *rec.global_spk : "-");
    for (Eigen::Index k = 0; k < rec.vector.size(); k++)
      os << ',' << FormatReal(rec.vector(k));
    os << '\n';
  }
  if (!os) throw Error("error writing " + path);
}

}  // namespace lplda
