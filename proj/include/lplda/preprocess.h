// lplda/preprocess.h

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

#ifndef LPLDA_PREPROCESS_H_
#define LPLDA_PREPROCESS_H_

#include <vector>

#include "lplda/common.h"

namespace lplda {

/// Centering + symmetric whitening + unit-length normalization. The same
/// fitted instance must be applied to training, enrollment and test vectors.
class Preprocessor {
 public:
  Preprocessor() = default;
  Preprocessor(Vector mean, Matrix whitener, size_t fitted_on);

  /// mean 0, whitener I: only length normalization remains.
  static Preprocessor Identity(int dim);

  /// Fits mean and whitener = (Cov + eps I)^(-1/2), eps = 1e-6 trace(Cov)/d.
  /// With whiten == false the whitener is left at identity.
  static Preprocessor Fit(const std::vector<Vector> &vectors, bool whiten = true);

  /// whitener * (v - mean), scaled to unit norm. Throws NumericError when the
  /// whitened vector is shorter than 1e-12.
  Vector LengthNormalize(const Vector &v) const;

  int Dim() const { return static_cast<int>(mean_.size()); }
  const Vector &Mean() const { return mean_; }
  const Matrix &Whitener() const { return whitener_; }
  size_t FittedOn() const { return fitted_on_; }

 private:
  Vector mean_;
  Matrix whitener_;
  size_t fitted_on_ = 0;
};

/// a.b / (|a| |b|). Throws NumericError on a zero vector.
double CosineScore(const Vector &a, const Vector &b);

}  // namespace lplda

#endif  // LPLDA_PREPROCESS_H_
