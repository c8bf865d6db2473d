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

#ifndef ATP_CONFIG_H_
#define ATP_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "atp/model.h"

namespace atp {

enum class PositionMode { kTree, kWordOffset };

std::string_view PositionModeName(PositionMode mode);

// Every training hyperparameter. Serialized as flat "key = value" lines,
// one per field, in the order declared here.
struct TrainConfig {
  int d_e = 100;
  int d_h = 150;
  int d_p = 50;
  int d_w = 100;
  int max_distance = kDefaultMaxDistance;
  int max_len = 0;  // 0: longest training sentence
  double lr = 0.001;
  double lr_factor = 0.5;
  int lr_patience = 5;
  int batch_size = 128;
  double dropout = 0.5;
  double recurrent_dropout = 0.5;
  int epochs = 30;
  std::uint64_t seed = 42;
  int upsample_target = -1;  // -1: median non-conflict class size, 0: off
  AspectPooling aspect_pooling = AspectPooling::kMean;
  bool freeze_embeddings = false;
  double rms_rho = 0.9;
  double rms_eps = 1e-8;
  double init_scale = 0.08;
  double dev_fraction = 0.1;
  bool lowercase = true;
  PositionMode position_mode = PositionMode::kTree;

  ModelSpec ToModelSpec() const;

  // Throws kBadConfig on any out-of-range field.
  void Validate() const;
};

// Unknown keys and unparsable values throw kBadConfig. Keys not present keep
// their defaults. '#' starts a comment.
TrainConfig ParseConfig(std::string_view text);
std::string SerializeConfig(const TrainConfig& config);

}  // namespace atp

#endif  // ATP_CONFIG_H_
