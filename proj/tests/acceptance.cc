// tests/acceptance.cc

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

// Acceptance suite.  Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.  Pass criterion numbers as arguments to run a subset.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "lplda/cli.h"
#include "lplda/eval.h"
#include "lplda/plda.h"
#include "lplda/synth.h"
#include "oracles.h"

using namespace lplda;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string Fmt(const char *fmt, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
  return buf;
}

Matrix RandomOrthogonal(std::mt19937_64 &gen, int n) {
  std::normal_distribution<double> normal;
  Matrix a(n, n);
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) a(i, j) = normal(gen);
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ();
}

PldaModel RandomModel(std::mt19937_64 &gen, int d, int q) {
  std::normal_distribution<double> normal;
  Vector u(d);
  Matrix v(d, q), a(d, d);
  for (int i = 0; i < d; i++) u(i) = normal(gen);
  for (int i = 0; i < d; i++)
    for (int j = 0; j < q; j++) v(i, j) = normal(gen);
  for (int i = 0; i < d; i++)
    for (int j = 0; j < d; j++) a(i, j) = normal(gen);
  Matrix sigma = a * a.transpose() / d + 0.3 * Matrix::Identity(d, d);
  return PldaModel(u, v, sigma);
}

Vector RandomVector(std::mt19937_64 &gen, int d) {
  std::normal_distribution<double> normal;
  Vector x(d);
  for (int i = 0; i < d; i++) x(i) = 2.0 * normal(gen);
  return x;
}

// Classes of vectors drawn from a freshly sampled truth.
std::vector<std::vector<Vector>> SampleClasses(int dim, int latent, size_t n_classes,
                                               size_t per_class, uint64_t seed) {
  SynthConfig cfg;
  cfg.dim = dim;
  cfg.latent_dim = latent;
  cfg.seed = seed;
  cfg.n_conversations = n_classes;
  cfg.slots_per_conversation = 1;
  cfg.utts_per_slot = per_class;
  cfg.recurrence = 0.0;
  Dataset data = SampleConversations(cfg);
  LabelView view = BuildGlobalView(data);
  auto index = data.Index();
  std::vector<std::vector<Vector>> classes;
  for (const LabelClass &c : view.classes) {
    classes.emplace_back();
    for (const std::string &m : c.members) classes.back().push_back(data.records[index.at(m)].vector);
  }
  return classes;
}

Outcome EmMonotonicity() {
  auto start = Clock::now();
  double worst = 0.0;  // largest relative drop
  size_t checked = 0;
  for (uint64_t seed = 0; seed < 20; seed++) {
    auto classes = SampleClasses(16, 4, 200, 5, 1000 + seed);
    TrainConfig cfg;
    cfg.latent_dim = 4;
    cfg.iterations = 50;
    cfg.loglik_tol = 0.0;
    cfg.seed = seed;
    TrainResult r = TrainEm(classes, cfg);
    if (r.loglik.size() != 50) return {false, "expected 50 log-likelihood values"};
    for (size_t i = 1; i < r.loglik.size(); i++) {
      double drop = (r.loglik[i - 1] - r.loglik[i]) / std::abs(r.loglik[i - 1]);
      worst = std::max(worst, drop);
      checked++;
    }
  }
  double t = Seconds(start);
  bool pass = worst <= 1e-8 && t < 60.0;
  return {pass, Fmt("%.0f steps, worst relative drop %.3g (limit 1e-8), %.1f s (limit 60)", checked,
                    worst, t)};
}

Outcome Recovery() {
  auto start = Clock::now();
  std::string detail;
  bool pass = true;
  for (uint64_t seed : {101, 202, 303}) {
    SynthConfig cfg;
    cfg.dim = 8;
    cfg.latent_dim = 2;
    cfg.seed = seed;
    cfg.n_conversations = 1000;
    cfg.slots_per_conversation = 1;
    cfg.utts_per_slot = 10;
    cfg.recurrence = 0.0;
    Dataset data = SampleConversations(cfg);
    PldaModel truth = SampleTruth(cfg);
    TrainConfig tc;
    tc.latent_dim = 2;
    tc.iterations = 100;
    tc.seed = seed;
    TrainResult r = TrainEm(data, BuildGlobalView(data), nullptr, tc);
    double eb = RelativeFrobenius(r.model.BetweenCov(), truth.BetweenCov());
    double es = RelativeFrobenius(r.model.ResidualCov(), truth.ResidualCov());
    pass = pass && eb < 0.15 && es < 0.10;
    detail += Fmt("B %.4f / Sigma %.4f; ", eb, es);
  }
  double t = Seconds(start);
  pass = pass && t < 60.0;
  return {pass, detail + Fmt("limits 0.15 / 0.10, %.1f s (limit 60)", t)};
}

Outcome ScoringOracle() {
  auto start = Clock::now();
  std::mt19937_64 gen(7);
  double worst = 0.0;
  for (int m = 0; m < 200; m++) {
    int d = 1 + static_cast<int>(gen() % 3);
    int q = 1 + static_cast<int>(gen() % std::min(2, d));
    PldaModel model = RandomModel(gen, d, q);
    size_t n = 1 + gen() % 2;
    std::vector<Vector> enroll;
    for (size_t i = 0; i < n; i++) enroll.push_back(RandomVector(gen, d));
    Vector test = RandomVector(gen, d);
    double got = ScoreLlr(model, enroll, test);
    double want = oracle::DenseLlr(model.Mean(), model.SpeakerBasis(), model.ResidualCov(), enroll, test);
    worst = std::max(worst, std::abs(got - want));
  }
  double t = Seconds(start);
  return {worst <= 1e-8 && t < 10.0,
          Fmt("200 models, max |error| %.3g (limit 1e-8), %.2f s (limit 10)", worst, t)};
}

Outcome RotationInvariance() {
  std::mt19937_64 gen(8);
  double worst = 0.0;
  for (int c = 0; c < 100; c++) {
    int d = 2 + static_cast<int>(gen() % 7);
    int q = 1 + static_cast<int>(gen() % d);
    PldaModel model = RandomModel(gen, d, q);
    PldaModel rotated(model.Mean(), model.SpeakerBasis() * RandomOrthogonal(gen, q), model.ResidualCov());
    std::vector<Vector> enroll;
    for (size_t i = 0, n = 1 + gen() % 3; i < n; i++) enroll.push_back(RandomVector(gen, d));
    Vector test = RandomVector(gen, d);
    worst = std::max(worst, std::abs(ScoreLlr(model, enroll, test) - ScoreLlr(rotated, enroll, test)));
  }
  return {worst <= 1e-9, Fmt("100 cases, max |change| %.3g (limit 1e-9)", worst)};
}

Outcome EerOracle() {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int c = 0; c < 1000; c++) {
    size_t nt = 1 + gen() % 200, nn = 1 + gen() % 200;
    double shift = 3.0 * std::uniform_real_distribution<double>()(gen);
    bool ties = c % 3 == 0;
    std::vector<double> tar, non;
    for (size_t i = 0; i < nt; i++) {
      double s = normal(gen) + shift;
      tar.push_back(ties ? std::round(2 * s) : s);
    }
    for (size_t i = 0; i < nn; i++) {
      double s = normal(gen);
      non.push_back(ties ? std::round(2 * s) : s);
    }
    worst = std::max(worst, std::abs(ComputeEer(tar, non).eer - oracle::BruteForceEer(tar, non)));
  }
  double separated = ComputeEer({2, 3, 4}, {-1, 0, 1}).eer;
  double identical = ComputeEer({1, 2, 3, 4}, {1, 2, 3, 4}).eer;
  bool pass = worst <= 1e-12 && separated == 0.0 && std::abs(identical - 0.5) <= 1e-12;
  return {pass, Fmt("1000 pairs, max |error| %.3g (limit 1e-12); separated %.3g, identical %.3g",
                    worst, separated, identical)};
}

Outcome TrialArithmetic() {
  auto count = [](size_t models, size_t tests) {
    std::vector<std::string> m, t;
    std::unordered_map<std::string, std::string> keys;
    for (size_t i = 0; i < models; i++) m.push_back("m" + std::to_string(i));
    for (size_t i = 0; i < tests; i++) {
      t.push_back("t" + std::to_string(i));
      keys[t.back()] = m[i % models];
    }
    return GenerateTrials(m, t, keys).trials.size();
  };
  size_t a = count(1236, 3708), b = count(1236, 2472);
  return {a == 4583088 && b == 3055392,
          Fmt("1236 x 3708 -> %.0f (want 4583088), 1236 x 2472 -> %.0f (want 3055392)", a, b)};
}

StrategyConfig BenchmarkStrategy() {
  StrategyConfig s;
  s.train.latent_dim = 10;
  s.train.iterations = 50;
  return s;
}

Outcome StrategyOrdering() {
  auto start = Clock::now();
  StrategyConfig s = BenchmarkStrategy();
  double cos = 0, gt = 0, lt = 0, pool = 0;
  const int seeds = 5;
  for (int seed = 0; seed < seeds; seed++) {
    Benchmark b = MakeBenchmark(BenchmarkConfig(), seed);
    EvalSet eval = MakeEvalSet(b.enroll, b.test);
    s.train.seed = seed;
    cos += RunStrategy(Strategy::kCosine, &b.global, nullptr, eval, s).eer / seeds;
    gt += RunStrategy(Strategy::kGlobal, &b.global, nullptr, eval, s).eer / seeds;
    lt += RunStrategy(Strategy::kLocal, nullptr, &b.local, eval, s).eer / seeds;
    pool += RunStrategy(Strategy::kPooled, &b.global, &b.local, eval, s).eer / seeds;
  }
  double t = Seconds(start);
  bool pass = cos - lt > 0.005 && lt - gt > 0.005 && t < 300.0;
  return {pass, Fmt("mean EER cosine %.4f, LT %.4f, GT %.4f", cos, lt, gt) +
                    Fmt(" (Pool %.4f); gaps must exceed 0.005; %.1f s (limit 300)", pool, t)};
}

SweepGrid Sweep(std::vector<size_t> global, std::vector<size_t> local, double recurrence) {
  SweepConfig cfg;
  cfg.axis_global = std::move(global);
  cfg.axis_local = std::move(local);
  cfg.repeats = 5;
  cfg.seed = 0;
  cfg.corpus.recurrence = recurrence;
  cfg.strategy = BenchmarkStrategy();
  return RunSweep(cfg);
}

Outcome SweepDirection() {
  auto start = Clock::now();
  std::string detail = "(a) g=0:";
  const std::vector<size_t> row{100, 200, 500, 1000, 2000};
  SweepGrid a = Sweep({0}, row, 0.05);
  bool pass_a = true;
  for (size_t i = 0; i < row.size(); i++) {
    detail += Fmt(" %.4f", a.MeanEer(0, row[i]));
    if (i > 0 && a.MeanEer(0, row[i]) > a.MeanEer(0, row[i - 1]) + 0.005) pass_a = false;
  }
  SweepGrid b = Sweep({20}, {0, 200}, 0.05);
  double gain_b = b.MeanEer(20, 0) - b.MeanEer(20, 200);
  SweepGrid c = Sweep({1000}, {0, 2000}, 0.3);
  double gain_c = c.MeanEer(1000, 0) - c.MeanEer(1000, 2000);
  double t = Seconds(start);
  bool pass = pass_a && gain_b > 0.005 && gain_c < 0.005 && t < 600.0;
  detail += pass_a ? " [ok]" : " [increase > 0.005]";
  detail += Fmt("; (b) g=20 %.4f -> %.4f, gain %.4f (need > 0.005)", b.MeanEer(20, 0), b.MeanEer(20, 200),
                gain_b);
  detail += Fmt("; (c) g=1000 rho=0.3 %.4f -> %.4f, gain %.4f (need < 0.005)", c.MeanEer(1000, 0),
                c.MeanEer(1000, 2000), gain_c);
  detail += Fmt("; %.1f s (limit 600)", t);
  return {pass, detail};
}

uint64_t ContentHash(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char ch : bytes) h = (h ^ ch) * 1099511628211ull;
  return h;
}

int Quiet(const std::vector<std::string> &args) {
  std::ostringstream sink;
  auto *old = std::cerr.rdbuf(sink.rdbuf());
  int code = RunCli(args);
  std::cerr.rdbuf(old);
  return code;
}

Outcome CliDeterminism() {
  fs::path root = fs::current_path() / "acceptance_cli";
  fs::remove_all(root);
  std::vector<std::map<std::string, uint64_t>> hashes;
  // Both runs use the same paths, since the report records where its scores went.
  fs::path dir = root;
  for (int run = 0; run < 2; run++) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto p = [&](const char *name) { return (dir / name).string(); };
    std::vector<std::vector<std::string>> commands{
        {"synth", "--dim", "12", "--latent", "3", "--conversations", "300", "--seed", "4", "--out",
         p("local.csv"), "--enroll", p("enroll.csv"), "--test", p("test.csv"), "--key", p("key.csv"),
         "--eval-speakers", "40"},
        {"synth", "--dim", "12", "--latent", "3", "--conversations", "100", "--slots", "1", "--utts", "4",
         "--recurrence", "0", "--prefix", "g", "--seed", "5", "--out", p("global.csv")},
        {"train", "--data", p("global.csv"), p("local.csv"), "--labels", "pooled", "--q", "3", "--iters",
         "10", "--seed", "6", "--model", p("pool.plda")},
        {"train", "--data", p("local.csv"), "--labels", "local", "--q", "3", "--iters", "10", "--seed", "6",
         "--model", p("lt.plda")},
        {"score", "--model", p("lt.plda"), "--enroll", p("enroll.csv"), "--test", p("test.csv"), "--scores",
         p("scores.csv"), "--threads", "1"},
        {"eval", "--model", p("pool.plda"), "--enroll", p("enroll.csv"), "--test", p("test.csv"), "--key",
         p("key.csv"), "--report", p("report.csv"), "--threads", "1"},
        {"sweep", "--grid-global", "0,30", "--grid-local", "60", "--repeats", "2", "--dim", "12",
         "--latent", "3", "--iters", "5", "--eval-speakers", "30", "--seed", "3", "--threads", "1", "--out",
         p("grid.csv")},
    };
    for (const auto &cmd : commands)
      if (Quiet(cmd) != 0) return {false, "command failed: " + cmd[0]};
    hashes.emplace_back();
    for (const auto &entry : fs::directory_iterator(dir))
      hashes.back()[entry.path().filename().string()] = ContentHash(entry.path());
  }
  size_t differing = 0;
  for (const auto &[name, h] : hashes[0])
    if (!hashes[1].count(name) || hashes[1].at(name) != h) differing++;
  bool pass = differing == 0 && hashes[0].size() == hashes[1].size() && hashes[0].size() >= 10;
  return {pass, Fmt("%.0f output files from 7 commands, %.0f differ between runs", hashes[0].size(),
                    differing)};
}

}  // namespace

int main(int argc, char **argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"EM log-likelihood is non-decreasing", EmMonotonicity},
      {"EM recovers ground-truth parameters", Recovery},
      {"LLR matches dense joint-Gaussian oracle", ScoringOracle},
      {"scores invariant to latent rotation", RotationInvariance},
      {"EER matches exhaustive sweep oracle", EerOracle},
      {"trial list sizes", TrialArithmetic},
      {"benchmark ordering cosine > LT > GT", StrategyOrdering},
      {"global/local sweep trends", SweepDirection},
      {"CLI outputs are bit-identical on rerun", CliDeterminism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; i++) wanted.insert(std::atoi(argv[i]));
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); i++) {
    int id = static_cast<int>(i) + 1;
    if (!wanted.empty() && !wanted.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) failures++;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << ". " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
