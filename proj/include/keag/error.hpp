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

#ifndef KEAG_ERROR_HPP_
#define KEAG_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace keag {

// Error kinds raised by the core library. The C API and the CLI map each
// kind onto a coarse category (config / data / numeric) for exit codes.
enum class ErrorKind {
  kShapeMismatch,
  kNonFiniteValue,
  kNonFiniteGradient,
  kTapeConsumed,
  kInvalidArgument,
  kEmptyCorpus,
  kEmptyQuestion,
  kEmptySequence,
  kMalformedLine,
  kDimensionMismatch,
  kInvalidSource,
  kEmptyFactSet,
  kDegenerateDistribution,
  kInvalidSchedule,
  kNonFiniteLoss,
  kVersionMismatch,
  kCorruptFile,
  kEmptyInput,
  kLengthMismatch,
  kIo,
  kConfig,
};

enum class ErrorCategory { kConfig, kData, kNumeric, kInternal };

const char* ErrorKindName(ErrorKind kind);
ErrorCategory CategoryOf(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return CategoryOf(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace keag

#endif  // KEAG_ERROR_HPP_
