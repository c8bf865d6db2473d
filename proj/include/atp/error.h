// Copyright 2026 The ATP Authors
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

#ifndef ATP_ERROR_H_
#define ATP_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace atp {

enum class ErrorCode {
  // Input data problems.
  kMalformedLine,
  kNonTree,
  kHeadOutOfRange,
  kXmlSyntax,
  kUnknownPolarity,
  kSpanOutOfBounds,
  kAlignmentFailure,
  kCountMismatch,
  kIndexOutOfRange,
  kPadTooSmall,
  kEmptyAspect,
  kNoConflictInstances,
  kBadCheckpoint,
  kBadConfig,
  kIo,
  // Programming / shape problems.
  kDimensionMismatch,
  kBadRate,
  // Numerics.
  kDivergenceDetected,
  kGradCheckFailed,
};

// Short stable identifier, e.g. "NonTree". Printed on CLI error lines.
std::string_view ErrorCodeName(ErrorCode code);

// Process exit code for an error: 3 for data errors, 4 for numeric ones.
int ExitCodeFor(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace atp

#endif  // ATP_ERROR_H_
