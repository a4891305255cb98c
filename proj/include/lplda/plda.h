// lplda/plda.h

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

#ifndef LPLDA_PLDA_H_
#define LPLDA_PLDA_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lplda/common.h"
#include "lplda/data_model.h"
#include "lplda/preprocess.h"
#include "lplda/trials.h"

namespace lplda {

/**
   PLDA model

     w_ij = u + V y_i + z_ij,   y_i ~ N(0, I_q),   z_ij ~ N(0, Sigma)

   so B = V V^T is the across-class covariance and T = B + Sigma the total
   covariance.  For a class of n vectors with centered sum s, the marginal
   likelihood factorizes (Woodbury + determinant lemma) into n independent
   Gaussian terms N(x_j; 0, Sigma) times a q-dimensional "speaker evidence"

     E(n, s) = -1/2 logdet(I + n M) + 1/2 b^T (I + n M)^{-1} b,
     M = V^T Sigma^{-1} V,   b = V^T Sigma^{-1} s.

   We diagonalize M = U diag(lambda) U^T once, so that E is a sum over the
   q eigen-directions.  Trial scores are differences of evidences, the
   per-vector Gaussian terms cancelling exactly.
 */
class PldaModel {
 public:
  PldaModel() = default;
  /// Validates (Sigma symmetric within 1e-10 relative, positive definite)
  /// and computes the derived quantities.
  PldaModel(Vector mean, Matrix speaker_basis, Matrix residual_cov);

  int Dim() const { return static_cast<int>(mean_.size()); }
  int LatentDim() const { return static_cast<int>(basis_.cols()); }

  const Vector &Mean() const { return mean_; }
  const Matrix &SpeakerBasis() const { return basis_; }     // V
  const Matrix &ResidualCov() const { return residual_; }   // Sigma
  const Matrix &BetweenCov() const { return between_; }     // B = V V^T
  const Matrix &TotalCov() const { return total_; }         // T = B + Sigma

  /// Projection of a centered vector (or a sum of them) onto the
  /// eigen-directions of M: U^T V^T Sigma^{-1} x.
  Vector ProjectCentered(const Vector &x) const { return projection_ * x; }
  const Matrix &Projection() const { return projection_; }
  /// Eigenvalues of M, clamped at zero.
  const Vector &EvidenceEigenvalues() const { return lambda_; }
  /// Eigenvectors U of M (q x q).
  const Matrix &EvidenceBasis() const { return evidence_basis_; }

  /// E(n, s) above, with `projected_sum` = ProjectCentered(s).
  double SpeakerEvidence(double n, const Vector &projected_sum) const;

  /// log N(x; 0, Sigma) summed over the columns' quadratic terms is
  /// -1/2 (n d log 2pi + n logdet Sigma + sum_j x_j^T Sigma^{-1} x_j).
  double ResidualLogDet() const { return residual_logdet_; }
  double ResidualQuadForm(const Vector &x) const;
  const Eigen::LLT<Matrix> &ResidualCholesky() const { return residual_chol_; }

 private:
  void ComputeDerivedVars();

  Vector mean_;
  Matrix basis_;
  Matrix residual_;
  Matrix between_;
  Matrix total_;
  Eigen::LLT<Matrix> residual_chol_;
  double residual_logdet_ = 0.0;
  Matrix projection_;
  Vector lambda_;
  Matrix evidence_basis_;
};

/// Posterior of the speaker factor y given n vectors of one class.
struct SpeakerPosterior {
  Vector mean;
  Matrix cov;
  size_t count = 0;
};

SpeakerPosterior ComputeSpeakerPosterior(const PldaModel &model,
                                         const std::vector<Vector> &vectors);

struct TrainConfig {
  int latent_dim = 0;
  int iterations = 50;
  uint64_t seed = 0;
  size_t min_class_size = 1;
  double loglik_tol = 1e-7;
  /// Optional starting point (V, Sigma); otherwise V ~ N(0, 1/d) entries and
  /// Sigma = sample covariance.
  std::optional<Matrix> init_basis;
  std::optional<Matrix> init_residual;
};

struct TrainResult {
  PldaModel model;
  /// Marginal data log-likelihood at the start of each iteration (before
  /// the M-step).
  std::vector<double> loglik;
  size_t num_classes = 0;
  size_t num_vectors = 0;
};

/// EM training.  When `pp` is null the raw vectors are modelled directly;
/// otherwise every vector is length-normalized by `pp` first.
TrainResult TrainEm(const Dataset &data, const LabelView &view,
                    const Preprocessor *pp, const TrainConfig &cfg);

/// Lower-level entry point on already-preprocessed classes.
TrainResult TrainEm(const std::vector<std::vector<Vector>> &classes,
                    const TrainConfig &cfg);

/// sum_i log N(stack of class i; u, joint covariance), via the q-space
/// factorization above.
double MarginalLogLik(const PldaModel &model,
                      const std::vector<std::vector<Vector>> &classes);

/// log p(enroll + test | same speaker) - log p(enroll) - log p(test).
double ScoreLlr(const PldaModel &model, const std::vector<Vector> &enroll,
                const Vector &test);

/// ScoreLlr over every trial, in trial order.  Vectors must already be
/// preprocessed.  Throws Error naming the first id that cannot be resolved.
std::vector<double> ScoreBatch(
    const PldaModel &model,
    const std::map<std::string, std::vector<Vector>> &enroll_models,
    const std::unordered_map<std::string, Vector> &test_vectors,
    const TrialSet &trials, int threads = 1);

struct ModelFile {
  PldaModel model;
  Preprocessor pp;
};

/// Text format, sections in order:
///   #plda dim=<d> q=<q>
///   u:  then one row;  V:  then d rows of q values;  Sigma:  then d rows;
///   pp.mean:  then one row;  pp.whitener:  then d rows.
void SaveModel(const PldaModel &model, const Preprocessor &pp,
               const std::string &path);
ModelFile LoadModel(const std::string &path);

}  // namespace lplda

#endif  // LPLDA_PLDA_H_
