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

// End-to-end finite-difference check of the model's backward pass on a
// random small instance.

#ifndef ATP_MODEL_GRADCHECK_H_
#define ATP_MODEL_GRADCHECK_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "atp/model.h"
#include "atp/nn.h"

namespace atp {

struct GradCheckDims {
  int d_e = 8;
  int d_h = 5;
  int d_p = 3;
  int d_w = 7;
  int steps = 6;         // real tokens
  int pad = 2;           // extra PAD steps
  int vocab = 10;        // words besides PAD/UNK
  int max_distance = 4;
  int aspect_len = 2;
  AspectPooling pooling = AspectPooling::kMean;
  bool dropout = false;  // fixed masks, redrawn identically per evaluation
  double init_scale = 0.5;
};

// Parses "d_e=8,d_h=5,d_p=3,d_w=7,T=6" style lists; omitted keys keep
// defaults. Throws kBadConfig.
GradCheckDims ParseGradCheckDims(std::string_view spec);

GradCheckReport RunModelGradCheck(const GradCheckDims& dims, std::uint64_t seed,
                                  double eps = 1e-5, double tol = 1e-4);

}  // namespace atp

#endif  // ATP_MODEL_GRADCHECK_H_
