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

#pragma once

#include <complex>
#include <span>

namespace mmforge::internal {

// In-place-safe 1-D complex DFT backed by FFTW. sign = -1 is the forward
// transform, +1 the unnormalized inverse. Thread-safe.
void Dft(std::span<const std::complex<double>> in, std::span<std::complex<double>> out, int sign);

}  // namespace mmforge::internal
