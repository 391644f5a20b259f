// Copyright 2026 The dpsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstddef>
#include <limits>

#include "dpsynth/kernels.h"

namespace dpsynth::kernels {
namespace {

double SumScalar(const double* x, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double DotScalar(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double SumSquaredDiffScalar(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

double MaxScalar(const double* x, size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < n; ++i) {
    if (x[i] > m) m = x[i];
  }
  return m;
}

void ScaleDivideScalar(double* out, const double* num, double scale,
                       const double* den, size_t n) {
  for (size_t i = 0; i < n; ++i) out[i] = scale * num[i] / den[i];
}

}  // namespace

const KernelTable& ScalarKernels() {
  static const KernelTable table{SumScalar, DotScalar, SumSquaredDiffScalar,
                                 MaxScalar, ScaleDivideScalar};
  return table;
}

}  // namespace dpsynth::kernels
