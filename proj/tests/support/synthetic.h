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

// Test-only helpers: random trees, an all-pairs distance oracle that shares
// no code with the BFS path, and a synthetic corpus whose label is carried
// by a token adjacent to the aspect in the tree but far from it in the
// word order.

#ifndef ATP_TESTS_SUPPORT_SYNTHETIC_H_
#define ATP_TESTS_SUPPORT_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "atp/config.h"
#include "atp/ingest.h"
#include "atp/tensor.h"

namespace atp::testing {

// Uniformly random labelled recursive tree on n tokens.
DepTree RandomTree(int n, Rng& rng);

// Floyd–Warshall over the undirected head edges; result[i][j] for 1-based
// i, j (row/column 0 unused).
std::vector<std::vector<int>> FloydWarshall(const DepTree& tree);

// The "price / service" sentence with heads [2,3,0,3,8,7,8,3,8].
DepTree PriceServiceTree();
std::string PriceServiceConllu();

struct SyntheticInstance {
  ReviewInstance instance;
  int determining_token = 0;  // 1-based position of the sentiment word
  int distractor_token = 0;
};

// `count` instances of length `length` (>= 8), alternating positive and
// negative. In every sentence the label word hangs directly off the aspect
// but sits at least 4 words away; a sentiment distractor of random polarity
// sits next to the aspect in the word order and 4 edges away in the tree.
std::vector<SyntheticInstance> MakeSyntheticCorpus(int count, std::uint64_t seed,
                                                   int length = 10);

std::vector<ReviewInstance> Instances(const std::vector<SyntheticInstance>& corpus);

// Small model that fits the synthetic corpus in a few seconds: all data is
// used for training, constant lr, no upsampling.
TrainConfig SyntheticTrainConfig();

// 1-based index of the largest attention weight.
int AttentionArgmax(const Vec& alpha);

// Builds a CoNLL-U line for token i.
std::string ConlluLine(int id, const std::string& form, int head,
                       const std::string& deprel);

}  // namespace atp::testing

#endif  // ATP_TESTS_SUPPORT_SYNTHETIC_H_
