// Copyright 2025 The rydtoff Authors
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

#include "rydtoff/error.hpp"

namespace rydtoff {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownSpecies: return "UnknownSpecies";
    case ErrorCode::kNonPositiveInteraction: return "NonPositiveInteraction";
    case ErrorCode::kCoincidentAtoms: return "CoincidentAtoms";
    case ErrorCode::kZeroDistance: return "ZeroDistance";
    case ErrorCode::kSingleControl: return "SingleControl";
    case ErrorCode::kUnsupportedN: return "UnsupportedN";
    case ErrorCode::kStepTooLarge: return "StepTooLarge";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParse: return "Parse";
  }
  return "Unknown";
}

}  // namespace rydtoff
