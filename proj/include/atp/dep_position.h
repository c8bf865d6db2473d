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

// Position signals for the attention layer: dependency-tree path distance
// from every token to the aspect span, and the plain word-offset baseline.

#ifndef ATP_DEP_POSITION_H_
#define ATP_DEP_POSITION_H_

#include <vector>

#include "atp/ingest.h"

namespace atp {

inline constexpr int kDefaultMaxDistance = 30;

struct PositionVector {
  std::vector<int> dists;  // one entry per token, 0 inside the aspect span
  int clamp = kDefaultMaxDistance;

  int pad_index() const { return clamp + 1; }
  friend bool operator==(const PositionVector&, const PositionVector&) = default;
};

// Number of edges between tokens i and j (1-based) in the undirected tree.
int TreeDistance(const DepTree& tree, int i, int j);

// BFS distances from `source` to every token; result indexed 1..n.
std::vector<int> DistancesFrom(const DepTree& tree, int source);

PositionVector TreePositionVector(const DepTree& tree, TokenSpan aspect,
                                  int clamp = kDefaultMaxDistance);

PositionVector WordOffsetVector(int n, TokenSpan aspect,
                                int clamp = kDefaultMaxDistance);

// Distances followed by PAD indices (clamp + 1) up to `pad_to` entries.
std::vector<int> ToEmbeddingIndices(const PositionVector& pv, int pad_to);

}  // namespace atp

#endif  // ATP_DEP_POSITION_H_
