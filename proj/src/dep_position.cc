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

#include "atp/dep_position.h"

#include <algorithm>
#include <deque>
#include <string>

#include "atp/error.h"

namespace atp {
namespace {

void CheckIndex(const DepTree& tree, int i) {
  if (i < 1 || i > tree.size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "token index " + std::to_string(i) + " outside [1, " +
                    std::to_string(tree.size()) + "]");
  }
}

void CheckSpan(int n, TokenSpan span) {
  if (span.begin < 1 || span.begin > span.end || span.end > n) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "aspect span [" + std::to_string(span.begin) + ", " +
                    std::to_string(span.end) + "] invalid for length " +
                    std::to_string(n));
  }
}

void CheckClamp(int clamp) {
  if (clamp < 1) {
    throw Error(ErrorCode::kIndexOutOfRange, "distance clamp must be >= 1");
  }
}

}  // namespace

std::vector<int> DistancesFrom(const DepTree& tree, int source) {
  CheckIndex(tree, source);
  const auto adj = tree.Adjacency();
  std::vector<int> dist(tree.size() + 1, -1);
  std::deque<int> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : adj[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

int TreeDistance(const DepTree& tree, int i, int j) {
  CheckIndex(tree, j);
  return DistancesFrom(tree, i)[j];
}

PositionVector TreePositionVector(const DepTree& tree, TokenSpan aspect,
                                  int clamp) {
  CheckSpan(tree.size(), aspect);
  CheckClamp(clamp);
  PositionVector pv;
  pv.clamp = clamp;
  pv.dists.assign(tree.size(), clamp);
  for (int a = aspect.begin; a <= aspect.end; ++a) {
    const auto dist = DistancesFrom(tree, a);
    for (int k = 1; k <= tree.size(); ++k) {
      pv.dists[k - 1] = std::min(pv.dists[k - 1], dist[k]);
    }
  }
  return pv;
}

PositionVector WordOffsetVector(int n, TokenSpan aspect, int clamp) {
  CheckSpan(n, aspect);
  CheckClamp(clamp);
  PositionVector pv;
  pv.clamp = clamp;
  pv.dists.resize(n);
  for (int k = 1; k <= n; ++k) {
    int d = 0;
    if (k < aspect.begin) d = aspect.begin - k;
    if (k > aspect.end) d = k - aspect.end;
    pv.dists[k - 1] = std::min(d, clamp);
  }
  return pv;
}

std::vector<int> ToEmbeddingIndices(const PositionVector& pv, int pad_to) {
  const int n = static_cast<int>(pv.dists.size());
  if (pad_to < n) {
    throw Error(ErrorCode::kPadTooSmall,
                "cannot pad length " + std::to_string(n) + " to " +
                    std::to_string(pad_to));
  }
  std::vector<int> out(pv.dists);
  out.resize(pad_to, pv.pad_index());
  return out;
}

}  // namespace atp
