// lplda/preprocess.cc

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

#include "lplda/preprocess.h"

#include <algorithm>
#include <cmath>

namespace lplda {

Preprocessor::Preprocessor(Vector mean, Matrix whitener, size_t fitted_on)
    : mean_(std::move(mean)), whitener_(std::move(whitener)), fitted_on_(fitted_on) {
  const Eigen::Index d = mean_.size();
  if (whitener_.rows() != d || whitener_.cols() != d)
    throw NumericError("whitener shape does not match mean dimension");
  if (!mean_.allFinite() || !whitener_.allFinite())
    throw NumericError("preprocessor has non-finite entries");
  double scale = std::max(whitener_.norm(), 1e-300);
  if ((whitener_ - whitener_.transpose()).norm() > 1e-10 * scale)
    throw NumericError("whitener is not symmetric");
}

Preprocessor Preprocessor::Identity(int dim) {
  return Preprocessor(Vector::Zero(dim), Matrix::Identity(dim, dim), 0);
}

Preprocessor Preprocessor::Fit(const std::vector<Vector> &vectors, bool whiten) {
  if (vectors.size() < 2)
    throw NumericError("preprocessor fit needs at least 2 vectors, got " +
                       std::to_string(vectors.size()));
  const Eigen::Index d = vectors[0].size();
  Vector mean = Vector::Zero(d);
  for (const Vector &v : vectors) {
    if (v.size() != d) throw NumericError("preprocessor fit: dimension mismatch");
    mean += v;
  }
  mean /= static_cast<double>(vectors.size());
  if (!whiten) return Preprocessor(mean, Matrix::Identity(d, d), vectors.size());

  Matrix cov = Matrix::Zero(d, d);
  for (const Vector &v : vectors) {
    Vector c = v - mean;
    cov.selfadjointView<Eigen::Lower>().rankUpdate(c);
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(vectors.size());
  // Ridge scaled to the average variance; a sample with zero spread falls
  // back to unit scale so the whitener stays finite.
  double avg_var = cov.trace() / static_cast<double>(d);
  double eps = 1e-6 * (avg_var > 0.0 ? avg_var : 1.0);
  cov.diagonal().array() += eps;
  return Preprocessor(mean, InverseSqrtSymmetric(cov), vectors.size());
}

Vector Preprocessor::LengthNormalize(const Vector &v) const {
  if (v.size() != mean_.size())
    throw NumericError("length normalization: dimension mismatch");
  Vector w = whitener_ * (v - mean_);
  double norm = w.norm();
  if (!(norm >= 1e-12))
    throw NumericError("length normalization of a degenerate vector (norm " +
                       FormatReal(norm) + ")");
  return w / norm;
}

double CosineScore(const Vector &a, const Vector &b) {
  if (a.size() != b.size()) throw NumericError("cosine score: dimension mismatch");
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw NumericError("cosine score of a zero vector");
  double c = a.dot(b) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace lplda
