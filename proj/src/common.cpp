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

#include "mmforge/common.hpp"

namespace mmforge {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kTopologyMismatch: return "topology_mismatch";
    case ErrorCode::kOutOfRange: return "out_of_range";
    case ErrorCode::kNetwork: return "network";
    case ErrorCode::kMalformedResponse: return "malformed_response";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kInternal: return "internal";
  }
  return "internal";
}

const char* Version() { return "0.1.0"; }

}  // namespace mmforge
