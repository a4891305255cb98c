// lplda/plda.cc

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

#include "lplda/plda.h"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace lplda {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

// Clamps eigenvalues of a symmetric matrix below floor_rel * trace / d.
// Returns the input untouched when no clamping is needed.
Matrix FloorEigenvalues(const Matrix &m, double floor_rel) {
  const Eigen::Index d = m.rows();
  double floor = floor_rel * m.trace() / static_cast<double>(d);
  if (!(floor > 0.0)) throw NumericError("residual covariance has non-positive trace");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  if (eig.eigenvalues().minCoeff() >= floor) return m;
  Vector clamped = eig.eigenvalues().cwiseMax(floor);
  Matrix out = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace

PldaModel::PldaModel(Vector mean, Matrix speaker_basis, Matrix residual_cov)
    : mean_(std::move(mean)),
      basis_(std::move(speaker_basis)),
      residual_(std::move(residual_cov)) {
  ComputeDerivedVars();
}

void PldaModel::ComputeDerivedVars() {
  const Eigen::Index d = mean_.size();
  if (d == 0) throw NumericError("PLDA model has dimension 0");
  if (basis_.rows() != d)
    throw NumericError("speaker basis has " + std::to_string(basis_.rows()) +
                       " rows, expected " + std::to_string(d));
  if (basis_.cols() > d) throw NumericError("latent dimension exceeds data dimension");
  if (residual_.rows() != d || residual_.cols() != d)
    throw NumericError("residual covariance has wrong shape");
  if (!mean_.allFinite() || !basis_.allFinite() || !residual_.allFinite())
    throw NumericError("PLDA model has non-finite parameters");
  if ((residual_ - residual_.transpose()).norm() > 1e-10 * residual_.norm())
    throw NumericError("residual covariance is not symmetric");
  residual_ = 0.5 * (residual_ + residual_.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(residual_, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > 0.0))
    throw NumericError("residual covariance is not positive definite");
  residual_chol_.compute(residual_);
  if (residual_chol_.info() != Eigen::Success)
    throw NumericError("residual covariance is not positive definite");
  residual_logdet_ = 2.0 * residual_chol_.matrixLLT().diagonal().array().log().sum();

  between_ = basis_ * basis_.transpose();
  total_ = between_ + residual_;

  const Eigen::Index q = basis_.cols();
  if (q == 0) {
    projection_.resize(0, d);
    lambda_.resize(0);
    evidence_basis_.resize(0, 0);
    return;
  }
  Matrix sinv_v = residual_chol_.solve(basis_);  // Sigma^{-1} V
  Matrix m = basis_.transpose() * sinv_v;
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> meig(m);
  if (meig.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  lambda_ = meig.eigenvalues().cwiseMax(0.0);
  evidence_basis_ = meig.eigenvectors();
  projection_ = evidence_basis_.transpose() * sinv_v.transpose();
}

double PldaModel::SpeakerEvidence(double n, const Vector &projected_sum) const {
  double ans = 0.0;
  for (Eigen::Index k = 0; k < lambda_.size(); k++) {
    double p = 1.0 + n * lambda_(k);
    ans += -0.5 * std::log(p) + 0.5 * projected_sum(k) * projected_sum(k) / p;
  }
  return ans;
}

double PldaModel::ResidualQuadForm(const Vector &x) const {
  return residual_chol_.matrixL().solve(x).squaredNorm();
}

SpeakerPosterior ComputeSpeakerPosterior(const PldaModel &model,
                                         const std::vector<Vector> &vectors) {
  const Eigen::Index q = model.LatentDim();
  SpeakerPosterior post;
  post.count = vectors.size();
  Vector sum = Vector::Zero(model.Dim());
  for (const Vector &v : vectors) sum += v - model.Mean();
  Vector inv = (1.0 + static_cast<double>(vectors.size()) *
                          model.EvidenceEigenvalues().array()).inverse().matrix();
  const Matrix &u = model.EvidenceBasis();
  post.cov = u * inv.asDiagonal() * u.transpose();
  post.cov = 0.5 * (post.cov + post.cov.transpose());
  post.mean = q == 0 ? Vector(0)
                     : Vector(u * inv.cwiseProduct(model.ProjectCentered(sum)));
  return post;
}

double MarginalLogLik(const PldaModel &model,
                      const std::vector<std::vector<Vector>> &classes) {
  const double d = model.Dim();
  double total = 0.0;
  for (const std::vector<Vector> &cls : classes) {
    Vector sum = Vector::Zero(model.Dim());
    double quad = 0.0;
    for (const Vector &v : cls) {
      if (v.size() != model.Dim()) throw NumericError("marginal likelihood: dimension mismatch");
      if (!v.allFinite()) throw NumericError("marginal likelihood: non-finite input");
      Vector x = v - model.Mean();
      quad += model.ResidualQuadForm(x);
      sum += x;
    }
    double n = static_cast<double>(cls.size());
    total += -0.5 * (n * d * kLog2Pi + n * model.ResidualLogDet() + quad) +
             model.SpeakerEvidence(n, model.ProjectCentered(sum));
  }
  return total;
}

double ScoreLlr(const PldaModel &model, const std::vector<Vector> &enroll,
                const Vector &test) {
  if (enroll.empty()) throw Error("score_llr: empty enrollment set");
  if (test.size() != model.Dim()) throw Error("score_llr: dimension mismatch");
  Vector enroll_sum = Vector::Zero(model.Dim());
  for (const Vector &e : enroll) {
    if (e.size() != model.Dim()) throw Error("score_llr: dimension mismatch");
    enroll_sum += e - model.Mean();
  }
  // The per-vector Gaussian terms of the three marginals cancel exactly.
  Vector pe = model.ProjectCentered(enroll_sum);
  Vector pt = model.ProjectCentered(test - model.Mean());
  double n = static_cast<double>(enroll.size());
  return model.SpeakerEvidence(n + 1.0, pe + pt) - model.SpeakerEvidence(n, pe) -
         model.SpeakerEvidence(1.0, pt);
}

std::vector<double> ScoreBatch(
    const PldaModel &model,
    const std::map<std::string, std::vector<Vector>> &enroll_models,
    const std::unordered_map<std::string, Vector> &test_vectors,
    const TrialSet &trials, int threads) {
  const Eigen::Index q = model.LatentDim();
  const Vector &lambda = model.EvidenceEigenvalues();

  // Per model: projected enrollment sum, its evidence, and the (n+1)
  // inverse/log-det terms needed for the joint hypothesis.
  struct ModelCache {
    Vector proj;
    Vector inv_joint;
    double half_logdet_joint = 0.0;
    double evidence = 0.0;
  };
  std::vector<ModelCache> models(trials.model_ids.size());
  for (size_t m = 0; m < trials.model_ids.size(); m++) {
    auto it = enroll_models.find(trials.model_ids[m]);
    if (it == enroll_models.end())
      throw Error("no enrollment vectors for model " + trials.model_ids[m]);
    if (it->second.empty()) throw Error("empty enrollment for model " + it->first);
    Vector sum = Vector::Zero(model.Dim());
    for (const Vector &e : it->second) {
      if (e.size() != model.Dim()) throw Error("dimension mismatch in model " + it->first);
      sum += e - model.Mean();
    }
    double n = static_cast<double>(it->second.size());
    ModelCache &c = models[m];
    c.proj = model.ProjectCentered(sum);
    c.evidence = model.SpeakerEvidence(n, c.proj);
    Vector p = (1.0 + (n + 1.0) * lambda.array()).matrix();
    c.inv_joint = p.cwiseInverse();
    c.half_logdet_joint = 0.5 * p.array().log().sum();
  }
  std::vector<Vector> test_proj(trials.test_ids.size());
  std::vector<double> test_evidence(trials.test_ids.size());
  for (size_t t = 0; t < trials.test_ids.size(); t++) {
    auto it = test_vectors.find(trials.test_ids[t]);
    if (it == test_vectors.end())
      throw Error("no test vector for utterance " + trials.test_ids[t]);
    if (it->second.size() != model.Dim())
      throw Error("dimension mismatch in test utterance " + it->first);
    test_proj[t] = model.ProjectCentered(it->second - model.Mean());
    test_evidence[t] = model.SpeakerEvidence(1.0, test_proj[t]);
  }

  std::vector<double> scores(trials.trials.size());
  ParallelFor(trials.trials.size(), threads, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; i++) {
      const Trial &tr = trials.trials[i];
      const ModelCache &c = models[tr.model];
      const Vector &pt = test_proj[tr.test];
      double quad = 0.0;
      for (Eigen::Index k = 0; k < q; k++) {
        double b = c.proj(k) + pt(k);
        quad += b * b * c.inv_joint(k);
      }
      scores[i] = (-c.half_logdet_joint + 0.5 * quad) - c.evidence - test_evidence[tr.test];
    }
  });
  return scores;
}

TrainResult TrainEm(const Dataset &data, const LabelView &view,
                    const Preprocessor *pp, const TrainConfig &cfg) {
  std::unordered_map<std::string, size_t> index = data.Index();
  std::vector<std::vector<Vector>> classes;
  classes.reserve(view.classes.size());
  for (const LabelClass &c : view.classes) {
    std::vector<Vector> members;
    members.reserve(c.members.size());
    for (const std::string &utt : c.members) {
      auto it = index.find(utt);
      if (it == index.end())
        throw Error("label view references unknown utterance " + utt);
      const Vector &v = data.records[it->second].vector;
      members.push_back(pp ? pp->LengthNormalize(v) : v);
    }
    classes.push_back(std::move(members));
  }
  return TrainEm(classes, cfg);
}

TrainResult TrainEm(const std::vector<std::vector<Vector>> &all_classes,
                    const TrainConfig &cfg) {
  if (cfg.iterations < 1) throw ConfigError("iterations must be at least 1");
  if (cfg.latent_dim < 0) throw ConfigError("latent dimension must be non-negative");

  std::vector<const std::vector<Vector> *> classes;
  for (const auto &c : all_classes)
    if (!c.empty() && c.size() >= cfg.min_class_size) classes.push_back(&c);
  if (classes.size() < 2)
    throw ConfigError("PLDA training needs at least 2 classes, " +
                      std::to_string(classes.size()) + " remain after filtering");
  const Eigen::Index d = classes[0]->front().size();
  const Eigen::Index q = cfg.latent_dim;
  if (q > d)
    throw ConfigError("latent dimension " + std::to_string(q) +
                      " exceeds data dimension " + std::to_string(d));
  const Eigen::Index num_classes = static_cast<Eigen::Index>(classes.size());

  // Global mean, fixed for the whole run.
  Vector mean = Vector::Zero(d);
  size_t num_vectors = 0;
  for (const auto *c : classes)
    for (const Vector &v : *c) {
      if (v.size() != d) throw NumericError("training vectors differ in dimension");
      if (!v.allFinite()) throw NumericError("non-finite training vector");
      mean += v;
      num_vectors++;
    }
  const double total_n = static_cast<double>(num_vectors);
  mean /= total_n;

  // Sufficient statistics: per-class counts and centered sums, total scatter.
  Vector counts(num_classes);
  Matrix sums = Matrix::Zero(d, num_classes);
  Matrix scatter = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < num_classes; i++) {
    counts(i) = static_cast<double>(classes[i]->size());
    for (const Vector &v : *classes[i]) {
      Vector x = v - mean;
      sums.col(i) += x;
      scatter.selfadjointView<Eigen::Lower>().rankUpdate(x);
    }
  }
  scatter = scatter.selfadjointView<Eigen::Lower>();

  Rng rng(cfg.seed);
  Matrix basis = rng.NormalMatrix(d, q, 1.0 / std::sqrt(static_cast<double>(d)));
  Matrix residual = FloorEigenvalues(scatter / total_n, 1e-8);
  if (cfg.init_basis) {
    if (cfg.init_basis->rows() != d || cfg.init_basis->cols() != q)
      throw ConfigError("initial speaker basis has the wrong shape");
    basis = *cfg.init_basis;
  }
  if (cfg.init_residual) {
    if (cfg.init_residual->rows() != d || cfg.init_residual->cols() != d)
      throw ConfigError("initial residual covariance has the wrong shape");
    residual = *cfg.init_residual;
  }

  TrainResult result;
  result.num_classes = classes.size();
  result.num_vectors = num_vectors;
  for (int iter = 0; iter < cfg.iterations; iter++) {
    PldaModel model(mean, basis, residual);

    // E-step, in the eigenbasis of M where every posterior covariance is
    // diagonal: inv(k, i) = 1 / (1 + n_i lambda_k).
    const Vector &lambda = model.EvidenceEigenvalues();
    Matrix proj = model.Projection() * sums;  // q x C
    Matrix inv(q, num_classes);
    double evidence = 0.0;
    for (Eigen::Index i = 0; i < num_classes; i++) {
      for (Eigen::Index k = 0; k < q; k++) {
        double p = 1.0 + counts(i) * lambda(k);
        inv(k, i) = 1.0 / p;
        evidence += -0.5 * std::log(p) + 0.5 * proj(k, i) * proj(k, i) / p;
      }
    }
    double trace_term = model.ResidualCholesky().solve(scatter).trace();
    double loglik = -0.5 * (total_n * static_cast<double>(d) * kLog2Pi +
                            total_n * model.ResidualLogDet() + trace_term) +
                    evidence;
    if (!std::isfinite(loglik))
      throw NumericError("non-finite log-likelihood at EM iteration " + std::to_string(iter));
    result.loglik.push_back(loglik);
    if (iter > 0 && cfg.loglik_tol > 0.0) {
      double prev = result.loglik[iter - 1];
      if ((loglik - prev) / std::abs(prev) < cfg.loglik_tol) break;
    }

    // M-step.
    if (q > 0) {
      const Matrix &u = model.EvidenceBasis();
      Matrix post_means = u * proj.cwiseProduct(inv);                 // q x C
      Matrix cross = sums * post_means.transpose();                   // sum_i s_i m_i^T
      Vector cov_weight = inv * counts;                               // sum_i n_i inv_i
      Matrix second = u * cov_weight.asDiagonal() * u.transpose() +
                      post_means * counts.asDiagonal() * post_means.transpose();
      second = 0.5 * (second + second.transpose());
      Eigen::LLT<Matrix> chol(second);
      if (chol.info() != Eigen::Success)
        throw NumericError("singular second-moment matrix at EM iteration " +
                           std::to_string(iter));
      basis = chol.solve(cross.transpose()).transpose();
      Matrix new_residual = (scatter - basis * cross.transpose()) / total_n;
      residual = 0.5 * (new_residual + new_residual.transpose());
    } else {
      residual = scatter / total_n;
    }
    if (!basis.allFinite() || !residual.allFinite())
      throw NumericError("non-finite parameter update at EM iteration " + std::to_string(iter));
    residual = FloorEigenvalues(residual, 1e-8);
  }
  result.model = PldaModel(mean, basis, residual);
  return result;
}

namespace {

void WriteRow(std::ostream &os, const auto &row) {
  for (Eigen::Index k = 0; k < row.size(); k++) {
    if (k) os << ',';
    os << FormatReal(row(k));
  }
  os << '\n';
}

class ModelReader {
 public:
  ModelReader(std::istream &is, std::string path) : is_(is), path_(std::move(path)) {}

  [[noreturn]] void Fail(const std::string &what) const {
    throw ParseError(path_ + ":" + std::to_string(line_no_) + ": " + what);
  }

  bool Next(std::string *line) {
    if (!std::getline(is_, *line)) return false;
    line_no_++;
    return true;
  }

  void ExpectSection(const std::string &name) {
    std::string line;
    if (!Next(&line)) Fail("missing section '" + name + "' (truncated file)");
    if (line != name) Fail("expected section '" + name + "', found '" + line + "'");
  }

  Vector Row(const std::string &section, Eigen::Index len) {
    std::string line;
    if (!Next(&line)) Fail("truncated section '" + section + "'");
    Vector out(len);
    if (len == 0) {
      if (!line.empty()) Fail("expected empty row in section '" + section + "'");
      return out;
    }
    auto fields = SplitFields(line, ',');
    if (static_cast<Eigen::Index>(fields.size()) != len)
      Fail("section '" + section + "': expected " + std::to_string(len) + " values, found " +
           std::to_string(fields.size()));
    for (Eigen::Index k = 0; k < len; k++)
      if (!ParseReal(fields[k], &out(k)))
        Fail("section '" + section + "': bad number '" + std::string(fields[k]) + "'");
    return out;
  }

  Matrix Rows(const std::string &section, Eigen::Index rows, Eigen::Index cols) {
    ExpectSection(section);
    Matrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; r++) out.row(r) = Row(section, cols).transpose();
    return out;
  }

 private:
  std::istream &is_;
  std::string path_;
  size_t line_no_ = 0;
};

}  // namespace

void SaveModel(const PldaModel &model, const Preprocessor &pp, const std::string &path) {
  if (pp.Dim() != model.Dim())
    throw Error("preprocessor dimension does not match model dimension");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write model file " + path);
  os << "#plda dim=" << model.Dim() << " q=" << model.LatentDim() << '\n';
  os << "u:\n";
  WriteRow(os, model.Mean());
  os << "V:\n";
  for (Eigen::Index r = 0; r < model.Dim(); r++) WriteRow(os, model.SpeakerBasis().row(r));
  os << "Sigma:\n";
  for (Eigen::Index r = 0; r < model.Dim(); r++) WriteRow(os, model.ResidualCov().row(r));
  os << "pp.mean:\n";
  WriteRow(os, pp.Mean());
  os << "pp.whitener:\n";
  for (Eigen::Index r = 0; r < model.Dim(); r++) WriteRow(os, pp.Whitener().row(r));
  if (!os) throw Error("error writing " + path);
}

ModelFile LoadModel(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open model file " + path);
  ModelReader reader(is, path);
  std::string header;
  if (!reader.Next(&header)) reader.Fail("missing '#plda' header (empty file)");
  unsigned long dim = 0, q = 0;
  {
    std::istringstream hs(header);
    std::string tag, dim_tok, q_tok, extra;
    hs >> tag >> dim_tok >> q_tok;
    uint64_t dv = 0, qv = 0;
    if (tag != "#plda" || dim_tok.rfind("dim=", 0) != 0 || q_tok.rfind("q=", 0) != 0 ||
        !ParseUint(std::string_view(dim_tok).substr(4), &dv) ||
        !ParseUint(std::string_view(q_tok).substr(2), &qv) || dv == 0 || (hs >> extra))
      reader.Fail("malformed header, expected '#plda dim=<d> q=<q>'");
    dim = dv;
    q = qv;
  }
  if (q > dim) reader.Fail("q exceeds dim in header");
  const auto d = static_cast<Eigen::Index>(dim);
  Vector u = reader.Rows("u:", 1, d).row(0).transpose();
  Matrix v = reader.Rows("V:", d, static_cast<Eigen::Index>(q));
  Matrix sigma = reader.Rows("Sigma:", d, d);
  Vector pp_mean = reader.Rows("pp.mean:", 1, d).row(0).transpose();
  Matrix whitener = reader.Rows("pp.whitener:", d, d);
  return ModelFile{PldaModel(std::move(u), std::move(v), std::move(sigma)),
                   Preprocessor(std::move(pp_mean), std::move(whitener), 0)};
}

}  // namespace lplda
