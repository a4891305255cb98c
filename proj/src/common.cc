// lplda/common.cc

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

#include "lplda/common.h"

#include <charconv>
#include <algorithm>
#include <cmath>
#include <exception>
#include <system_error>
#include <thread>
#include <vector>

namespace lplda {

Matrix Rng::NormalMatrix(Eigen::Index rows, Eigen::Index cols, double stddev) {
  Matrix m(rows, cols);
  // Row-major fill so the draw order does not depend on Eigen's storage order.
  for (Eigen::Index r = 0; r < rows; r++)
    for (Eigen::Index c = 0; c < cols; c++)
      m(r, c) = stddev * Normal();
  return m;
}

Vector Rng::NormalVector(Eigen::Index dim) {
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; i++) v(i) = Normal();
  return v;
}

std::string FormatReal(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

bool ParseReal(std::string_view token, double *value) {
  if (token.empty()) return false;
  const char *begin = token.data(), *end = token.data() + token.size();
  if (*begin == '+') begin++;
  auto res = std::from_chars(begin, end, *value);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(*value);
}

bool ParseUint(std::string_view token, uint64_t *value) {
  if (token.empty()) return false;
  const char *end = token.data() + token.size();
  auto res = std::from_chars(token.data(), end, *value);
  return res.ec == std::errc() && res.ptr == end;
}

std::vector<std::string_view> SplitFields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

Matrix InverseSqrtSymmetric(const Matrix &m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success)
    throw NumericError("eigendecomposition failed");
  const Vector &lambda = eig.eigenvalues();
  if (lambda.size() > 0 && !(lambda.minCoeff() > 0.0))
    throw NumericError("matrix is not positive definite (min eigenvalue " +
                       FormatReal(lambda.minCoeff()) + ")");
  Matrix out = eig.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal() *
               eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

void ParallelFor(size_t n, int threads,
                 const std::function<void(size_t, size_t)> &fn) {
  size_t workers = threads < 1 ? 1 : static_cast<size_t>(threads);
  workers = std::min(workers, n);
  if (workers <= 1) {
    if (n > 0) fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  size_t chunk = (n + workers - 1) / workers;
  for (size_t w = 0; w * chunk < n; w++) {
    pool.emplace_back([&, w] {
      try {
        fn(w * chunk, std::min(n, (w + 1) * chunk));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread &t : pool) t.join();
  for (const std::exception_ptr &e : errors)
    if (e) std::rethrow_exception(e);
}

double RelativeFrobenius(const Matrix &a, const Matrix &b) {
  double denom = b.norm();
  return denom > 0.0 ? (a - b).norm() / denom : (a - b).norm();
}

}  // namespace lplda
