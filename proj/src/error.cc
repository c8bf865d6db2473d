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

#include "atp/error.h"

namespace atp {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kNonTree: return "NonTree";
    case ErrorCode::kHeadOutOfRange: return "HeadOutOfRange";
    case ErrorCode::kXmlSyntax: return "XmlSyntax";
    case ErrorCode::kUnknownPolarity: return "UnknownPolarity";
    case ErrorCode::kSpanOutOfBounds: return "SpanOutOfBounds";
    case ErrorCode::kAlignmentFailure: return "AlignmentFailure";
    case ErrorCode::kCountMismatch: return "CountMismatch";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kPadTooSmall: return "PadTooSmall";
    case ErrorCode::kEmptyAspect: return "EmptyAspect";
    case ErrorCode::kNoConflictInstances: return "NoConflictInstances";
    case ErrorCode::kBadCheckpoint: return "BadCheckpoint";
    case ErrorCode::kBadConfig: return "BadConfig";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kBadRate: return "BadRate";
    case ErrorCode::kDivergenceDetected: return "DivergenceDetected";
    case ErrorCode::kGradCheckFailed: return "GradCheckFailed";
  }
  return "Unknown";
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDivergenceDetected:
    case ErrorCode::kGradCheckFailed:
      return 4;
    default:
      return 3;
  }
}

}  // namespace atp
