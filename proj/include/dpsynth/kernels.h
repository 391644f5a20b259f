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

// Vector reductions used on the hot paths (rMSE, Dirichlet normalisation,
// log-sum-exp, rate estimates). Each kernel has a scalar reference version
// and SIMD variants; the public entry points dispatch at runtime to the best
// instruction set the CPU supports.
//
// Results of the SIMD variants differ from the scalar reference only by
// floating-point reassociation. Runs on the same ISA are bit-reproducible.
// Set DPSYNTH_ISA=scalar (or call ForceIsa) to pin the reference path.

#ifndef DPSYNTH_KERNELS_H_
#define DPSYNTH_KERNELS_H_

#include <span>
#include <string_view>

namespace dpsynth::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view IsaName(Isa isa);
bool IsaSupported(Isa isa);
Isa ActiveIsa();
// Throws UsageError when `isa` is not supported on this machine.
void ForceIsa(Isa isa);

double Sum(std::span<const double> x);
double Dot(std::span<const double> x, std::span<const double> y);
// sum_i (x_i - y_i)^2
double SumSquaredDiff(std::span<const double> x, std::span<const double> y);
// -inf for an empty span.
double Max(std::span<const double> x);
// out_i = scale * num_i / den_i
void ScaleDivide(std::span<double> out, std::span<const double> num, double scale,
                 std::span<const double> den);

// Per-ISA entry points. Callers outside the dispatcher and the equivalence
// tests should use the dispatched functions above.
struct KernelTable {
  double (*sum)(const double*, size_t);
  double (*dot)(const double*, const double*, size_t);
  double (*sum_squared_diff)(const double*, const double*, size_t);
  double (*max)(const double*, size_t);
  void (*scale_divide)(double*, const double*, double, const double*, size_t);
};

const KernelTable& ScalarKernels();
// nullptr when the variant was not compiled in.
const KernelTable* Avx2Kernels();
const KernelTable* NeonKernels();

}  // namespace dpsynth::kernels

#endif  // DPSYNTH_KERNELS_H_
