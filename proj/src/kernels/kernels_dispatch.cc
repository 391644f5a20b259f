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

#include <atomic>
#include <cstdlib>
#include <string>

#include "dpsynth/errors.h"
#include "dpsynth/kernels.h"

namespace dpsynth::kernels {

#ifndef DPSYNTH_HAVE_AVX2
const KernelTable* Avx2Kernels() { return nullptr; }
#endif
#ifndef DPSYNTH_HAVE_NEON
const KernelTable* NeonKernels() { return nullptr; }
#endif

namespace {

const KernelTable* TableFor(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &ScalarKernels();
    case Isa::kAvx2:
      return Avx2Kernels();
    case Isa::kNeon:
      return NeonKernels();
  }
  return nullptr;
}

Isa DetectBest() {
  if (const char* env = std::getenv("DPSYNTH_ISA")) {
    const std::string want(env);
    if (want == "scalar") return Isa::kScalar;
    if (want == "avx2" && IsaSupported(Isa::kAvx2)) return Isa::kAvx2;
    if (want == "neon" && IsaSupported(Isa::kNeon)) return Isa::kNeon;
  }
  if (IsaSupported(Isa::kAvx2)) return Isa::kAvx2;
  if (IsaSupported(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

struct Active {
  std::atomic<Isa> isa{DetectBest()};
};

Active& State() {
  static Active state;
  return state;
}

const KernelTable& Current() { return *TableFor(State().isa.load(std::memory_order_relaxed)); }

void RequireSameSize(size_t a, size_t b) {
  if (a != b) throw UsageError("kernel inputs have different lengths");
}

}  // namespace

std::string_view IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

bool IsaSupported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(DPSYNTH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::kNeon:
#ifdef DPSYNTH_HAVE_NEON
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa ActiveIsa() { return State().isa.load(std::memory_order_relaxed); }

void ForceIsa(Isa isa) {
  if (!IsaSupported(isa)) {
    throw UsageError("instruction set not available: " + std::string(IsaName(isa)));
  }
  State().isa.store(isa, std::memory_order_relaxed);
}

double Sum(std::span<const double> x) { return Current().sum(x.data(), x.size()); }

double Dot(std::span<const double> x, std::span<const double> y) {
  RequireSameSize(x.size(), y.size());
  return Current().dot(x.data(), y.data(), x.size());
}

double SumSquaredDiff(std::span<const double> x, std::span<const double> y) {
  RequireSameSize(x.size(), y.size());
  return Current().sum_squared_diff(x.data(), y.data(), x.size());
}

double Max(std::span<const double> x) { return Current().max(x.data(), x.size()); }

void ScaleDivide(std::span<double> out, std::span<const double> num, double scale,
                 std::span<const double> den) {
  RequireSameSize(out.size(), num.size());
  RequireSameSize(out.size(), den.size());
  Current().scale_divide(out.data(), num.data(), scale, den.data(), out.size());
}

}  // namespace dpsynth::kernels
