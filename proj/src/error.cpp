/* Copyright 2026 The KEAG Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#include "keag/error.hpp"

namespace keag {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kNonFiniteValue: return "NonFiniteValue";
    case ErrorKind::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorKind::kTapeConsumed: return "TapeConsumed";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kEmptyCorpus: return "EmptyCorpus";
    case ErrorKind::kEmptyQuestion: return "EmptyQuestion";
    case ErrorKind::kEmptySequence: return "EmptySequence";
    case ErrorKind::kMalformedLine: return "MalformedLine";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kInvalidSource: return "InvalidSource";
    case ErrorKind::kEmptyFactSet: return "EmptyFactSet";
    case ErrorKind::kDegenerateDistribution: return "DegenerateDistribution";
    case ErrorKind::kInvalidSchedule: return "InvalidSchedule";
    case ErrorKind::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::kVersionMismatch: return "VersionMismatch";
    case ErrorKind::kCorruptFile: return "CorruptFile";
    case ErrorKind::kEmptyInput: return "EmptyInput";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kIo: return "Io";
    case ErrorKind::kConfig: return "Config";
  }
  return "Unknown";
}

ErrorCategory CategoryOf(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kInvalidSchedule:
    case ErrorKind::kInvalidArgument:
      return ErrorCategory::kConfig;
    case ErrorKind::kNonFiniteValue:
    case ErrorKind::kNonFiniteGradient:
    case ErrorKind::kNonFiniteLoss:
    case ErrorKind::kDegenerateDistribution:
      return ErrorCategory::kNumeric;
    case ErrorKind::kShapeMismatch:
    case ErrorKind::kTapeConsumed:
    case ErrorKind::kInvalidSource:
      return ErrorCategory::kInternal;
    default:
      return ErrorCategory::kData;
  }
}

}  // namespace keag
