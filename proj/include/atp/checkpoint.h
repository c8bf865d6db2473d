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

// Named-tensor checkpoint archive.
//
// Layout:
//   line 1:  "ATPCKPT <version> <header_bytes>\n"
//   header:  <header_bytes> of JSON with the training config (verbatim
//            key = value text), the vocabulary, and one entry per tensor
//            giving name, rows, cols and byte offset into the payload
//   payload: row-major little-endian IEEE-754 binary64 values

#ifndef ATP_CHECKPOINT_H_
#define ATP_CHECKPOINT_H_

#include <string>
#include <string_view>

#include "atp/config.h"
#include "atp/model.h"

namespace atp {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  TrainConfig config;
  AtpParams params;
};

std::string SerializeCheckpoint(const AtpParams& params, const TrainConfig& config);
// Throws kBadCheckpoint on any format or shape problem.
Checkpoint DeserializeCheckpoint(std::string_view bytes);

void SaveCheckpoint(const std::string& path, const AtpParams& params,
                    const TrainConfig& config);
Checkpoint LoadCheckpoint(const std::string& path);

}  // namespace atp

#endif  // ATP_CHECKPOINT_H_
