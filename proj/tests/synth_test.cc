// tests/synth_test.cc

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

#include <cmath>
#include <set>

#include "doctest.h"
#include "lplda/synth.h"
#include "oracles.h"

using namespace lplda;

namespace {

SynthConfig Config(double rho, size_t convs, size_t slots, size_t utts, uint64_t seed = 1) {
  SynthConfig cfg;
  cfg.dim = 6;
  cfg.latent_dim = 2;
  cfg.seed = seed;
  cfg.n_conversations = convs;
  cfg.slots_per_conversation = slots;
  cfg.utts_per_slot = utts;
  cfg.recurrence = rho;
  return cfg;
}

std::set<std::string> Speakers(const Dataset &data) {
  std::set<std::string> out;
  for (const auto &r : data.records) out.insert(*r.global_spk);
  return out;
}

}  // namespace

TEST_CASE("truth sampling is deterministic and well conditioned") {
  SynthConfig cfg = Config(0.0, 1, 1, 1, 42);
  cfg.dim = 12;
  cfg.latent_dim = 4;
  PldaModel a = SampleTruth(cfg), b = SampleTruth(cfg);
  CHECK(a.SpeakerBasis() == b.SpeakerBasis());
  CHECK(a.ResidualCov() == b.ResidualCov());
  CHECK(a.Mean().isZero());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a.ResidualCov());
  CHECK(eig.eigenvalues().minCoeff() >= 0.5);
  CHECK(a.BetweenCov().trace() == doctest::Approx(a.ResidualCov().trace()).epsilon(1e-12));

  cfg.latent_dim = 0;
  PldaModel g = SampleTruth(cfg);
  CHECK(g.LatentDim() == 0);
  CHECK(g.BetweenCov().isZero());
}

TEST_CASE("no recurrence gives one speaker per slot") {
  SynthStats stats;
  Dataset data = SampleConversations(Config(0.0, 50, 3, 2), &stats);
  CHECK(data.records.size() == 300);
  CHECK(Speakers(data).size() == 150);
  CHECK(stats.distinct_speakers == 150);
  CHECK(stats.returning_slots == 0);
  CHECK(oracle::Partition(BuildLocalView(data)) == oracle::Partition(BuildGlobalView(data)));
  CHECK_NOTHROW(data.Validate());
}

TEST_CASE("full recurrence with one slot reuses the first speaker") {
  Dataset data = SampleConversations(Config(1.0, 40, 1, 2));
  CHECK(Speakers(data).size() == 1);
  CHECK(BuildLocalView(data).classes.size() == 40);
}

TEST_CASE("returning-speaker fraction tracks the recurrence rate") {
  for (uint64_t seed : {1, 2, 3}) {
    SynthStats stats;
    SampleConversations(Config(0.3, 1000, 2, 1, seed), &stats);
    CHECK(stats.total_slots == 2000);
    double frac = static_cast<double>(stats.returning_slots) / 2000.0;
    // 3 sigma binomial band: sqrt(0.3 * 0.7 / 2000) ~ 0.0102.
    CHECK(std::abs(frac - 0.3) < 0.03);
  }
}

TEST_CASE("participants within a conversation are distinct") {
  Dataset data = SampleConversations(Config(0.9, 300, 4, 1));
  std::map<std::string, std::set<std::string>> per_conv;
  std::map<std::string, size_t> slot_count;
  for (const auto &r : data.records) {
    per_conv[r.conv_id].insert(*r.global_spk);
    slot_count[r.conv_id]++;
  }
  for (const auto &[conv, spks] : per_conv) CHECK(spks.size() == slot_count[conv]);
}

TEST_CASE("generation is bit-reproducible and uses the stated truth") {
  SynthConfig cfg = Config(0.2, 30, 2, 3, 9);
  Dataset a = SampleConversations(cfg), b = SampleConversations(cfg);
  REQUIRE(a.records.size() == b.records.size());
  for (size_t i = 0; i < a.records.size(); i++) {
    CHECK(a.records[i].utt_id == b.records[i].utt_id);
    CHECK(a.records[i].global_spk == b.records[i].global_spk);
    CHECK(a.records[i].vector == b.records[i].vector);
  }
  cfg.id_prefix = "x";
  CHECK(SampleConversations(cfg).records[0].conv_id.rfind("x", 0) == 0);
}

TEST_CASE("empirical covariances converge to the generating model") {
  SynthConfig cfg = Config(0.0, 4000, 1, 5, 5);
  cfg.dim = 5;
  cfg.latent_dim = 2;
  Dataset data = SampleConversations(cfg);
  PldaModel truth = SampleTruth(cfg);
  LabelView view = BuildGlobalView(data);
  auto index = data.Index();
  Matrix within = Matrix::Zero(5, 5), between = Matrix::Zero(5, 5);
  size_t within_dof = 0;
  for (const auto &c : view.classes) {
    Vector mean = Vector::Zero(5);
    for (const auto &u : c.members) mean += data.records[index[u]].vector;
    mean /= static_cast<double>(c.members.size());
    for (const auto &u : c.members) {
      Vector x = data.records[index[u]].vector - mean;
      within += x * x.transpose();
    }
    within_dof += c.members.size() - 1;
    between += mean * mean.transpose();
  }
  within /= static_cast<double>(within_dof);
  between /= static_cast<double>(view.classes.size());
  // Per-speaker means carry Sigma / n of residual noise.
  Matrix between_expected = truth.BetweenCov() + truth.ResidualCov() / 5.0;
  CHECK(RelativeFrobenius(within, truth.ResidualCov()) < 0.1);
  CHECK(RelativeFrobenius(between, between_expected) < 0.1);
  CHECK(RelativeFrobenius(between - within / 5.0, truth.BetweenCov()) < 0.1);
}

TEST_CASE("evaluation split") {
  Dataset data = SampleConversations(Config(0.0, 10, 1, 4));
  EvalSplit split = SplitEval(data, 1, 3, 7);
  CHECK(split.enroll.records.size() == 10);
  CHECK(split.test.records.size() == 30);
  CHECK(split.excluded_speakers == 0);
  std::set<std::string> enroll_ids, test_ids;
  for (const auto &r : split.enroll.records) enroll_ids.insert(r.utt_id);
  for (const auto &r : split.test.records) test_ids.insert(r.utt_id);
  for (const auto &u : enroll_ids) CHECK(test_ids.count(u) == 0);
  CHECK(enroll_ids.size() + test_ids.size() == data.records.size());

  EvalSplit again = SplitEval(data, 1, 3, 7);
  for (size_t i = 0; i < split.test.records.size(); i++)
    CHECK(again.test.records[i].utt_id == split.test.records[i].utt_id);

  EvalSplit short_spk = SplitEval(data, 2, 3, 7);
  CHECK(short_spk.excluded_speakers == 10);
  CHECK(short_spk.test.records.empty());
}

TEST_CASE("C5-shaped evaluation split") {
  SynthConfig cfg = Config(0.0, 1236, 1, 4, 3);
  cfg.dim = 2;
  cfg.latent_dim = 1;
  EvalSplit split = SplitEval(SampleConversations(cfg), 1, 3, 1);
  CHECK(split.test.records.size() == 3708);
  CHECK(GroupEnrollment(split.enroll).size() == 1236);
}

TEST_CASE("synth configuration errors") {
  CHECK_THROWS_AS(SampleConversations(Config(1.5, 1, 1, 1)), ConfigError);
  CHECK_THROWS_AS(SampleConversations(Config(0.1, 0, 1, 1)), ConfigError);
  SynthConfig bad = Config(0.1, 1, 1, 1);
  bad.latent_dim = 7;
  CHECK_THROWS_AS(SampleTruth(bad), ConfigError);
}
