// lplda/common.h

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

#ifndef LPLDA_COMMON_H_
#define LPLDA_COMMON_H_

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace lplda {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for every data or validation failure raised by the library.
/// The command-line tool maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; the message carries the file and line number.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A record lacks a label required by the requested view.
class LabelingError : public Error {
 public:
  using Error::Error;
};

/// Two views handed to pooling share utterance ids.
class PoolingError : public Error {
 public:
  using Error::Error;
};

/// Invalid numeric state: singular covariance, non-finite update, bad model.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration (bad counts, empty sweep cell, strategy/data mismatch).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Seeded random stream. Every stochastic routine draws from one of these so
/// that a run is a pure function of its seed.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  double Normal() { return normal_(engine_); }
  double Uniform() { return uniform_(engine_); }
  /// Uniform integer in [0, n).
  size_t Index(size_t n) {
    return std::uniform_int_distribution<size_t>(0, n - 1)(engine_);
  }

  Matrix NormalMatrix(Eigen::Index rows, Eigen::Index cols, double stddev = 1.0);
  Vector NormalVector(Eigen::Index dim);

  std::mt19937_64 &Engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Shortest decimal text that parses back to exactly the same double.
std::string FormatReal(double value);

/// Strict parse of a whole token as a finite double; returns false otherwise.
bool ParseReal(std::string_view token, double *value);

/// Strict parse of a whole token as a non-negative integer.
bool ParseUint(std::string_view token, uint64_t *value);

/// Splits on `sep` without collapsing empty fields.
std::vector<std::string_view> SplitFields(std::string_view line, char sep);

/// Symmetric inverse square root of an SPD matrix via eigendecomposition.
Matrix InverseSqrtSymmetric(const Matrix &m);

/// Runs fn(begin, end) over a static partition of [0, n) into at most
/// `threads` contiguous chunks. Chunks are independent, so results that are
/// written per index do not depend on the thread count.
void ParallelFor(size_t n, int threads,
                 const std::function<void(size_t, size_t)> &fn);

/// Frobenius norm of (a - b) relative to the Frobenius norm of b.
double RelativeFrobenius(const Matrix &a, const Matrix &b);

}  // namespace lplda

#endif  // LPLDA_COMMON_H_
