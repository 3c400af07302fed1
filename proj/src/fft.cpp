// Copyright 2026 The mmforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "mmforge/common.hpp"

namespace mmforge::internal {

namespace {

std::mutex& PlanMutex() {
  static std::mutex mu;
  return mu;
}

// Plans are created once per (size, sign) and reused through the new-array
// execute interface, which FFTW guarantees to be thread-safe.
fftw_plan PlanFor(int n, int sign) {
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(PlanMutex());
  auto it = plans.find({n, sign});
  if (it != plans.end()) return it->second;
  std::vector<std::complex<double>> a(n), b(n);
  fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                    reinterpret_cast<fftw_complex*>(b.data()),
                                    sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan == nullptr) throw Error(ErrorCode::kInternal, "FFTW failed to create a plan");
  plans.emplace(std::make_pair(n, sign), plan);
  return plan;
}

}  // namespace

void Dft(std::span<const std::complex<double>> in, std::span<std::complex<double>> out, int sign) {
  if (in.size() != out.size()) throw Error(ErrorCode::kInvalidArgument, "DFT size mismatch");
  if (in.empty()) return;
  fftw_plan plan = PlanFor(static_cast<int>(in.size()), sign);
  // FFTW may overwrite its input for some plans; work on a copy.
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(scratch.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace mmforge::internal
