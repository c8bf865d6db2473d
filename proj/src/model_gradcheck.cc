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

#include "atp/model_gradcheck.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <numeric>

#include "atp/dep_position.h"
#include "atp/error.h"
#include "atp/ingest.h"

namespace atp {
namespace {

int ParseField(std::string_view key, std::string_view value) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || out < 0) {
    throw Error(ErrorCode::kBadConfig,
                "gradcheck dims: bad value for " + std::string(key));
  }
  return out;
}

// Random tree: token k attaches to a uniformly chosen earlier token of a
// random permutation.
DepTree RandomTree(int n, Rng& rng) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Token> tokens(n);
  for (int k = 0; k < n; ++k) {
    tokens[order[k] - 1].index = order[k];
    tokens[order[k] - 1].deprel = k == 0 ? "root" : "dep";
    if (k == 0) {
      tokens[order[k] - 1].head = 0;
    } else {
      std::uniform_int_distribution<int> parent(0, k - 1);
      tokens[order[k] - 1].head = order[parent(rng)];
    }
  }
  return DepTree::FromTokens(std::move(tokens));
}

}  // namespace

GradCheckDims ParseGradCheckDims(std::string_view spec) {
  GradCheckDims dims;
  std::map<std::string_view, int*> fields = {
      {"d_e", &dims.d_e},         {"d_h", &dims.d_h},
      {"d_p", &dims.d_p},         {"d_w", &dims.d_w},
      {"T", &dims.steps},         {"T_x", &dims.steps},
      {"pad", &dims.pad},         {"vocab", &dims.vocab},
      {"max_distance", &dims.max_distance}, {"aspect_len", &dims.aspect_len},
  };
  while (!spec.empty()) {
    const auto comma = spec.find(',');
    std::string_view item = spec.substr(0, comma);
    spec = comma == std::string_view::npos ? std::string_view{} : spec.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kBadConfig, "gradcheck dims: expected key=value");
    }
    const auto key = item.substr(0, eq);
    const auto value = item.substr(eq + 1);
    if (key == "pooling") {
      dims.pooling = ParsePooling(value);
      continue;
    }
    if (key == "dropout") {
      dims.dropout = ParseField(key, value) != 0;
      continue;
    }
    auto it = fields.find(key);
    if (it == fields.end()) {
      throw Error(ErrorCode::kBadConfig,
                  "gradcheck dims: unknown key '" + std::string(key) + "'");
    }
    *it->second = ParseField(key, value);
  }
  if (dims.steps < 1 || dims.aspect_len < 1 || dims.aspect_len > dims.steps ||
      dims.vocab < 1) {
    throw Error(ErrorCode::kBadConfig, "gradcheck dims out of range");
  }
  return dims;
}

GradCheckReport RunModelGradCheck(const GradCheckDims& dims, std::uint64_t seed,
                                  double eps, double tol) {
  Rng rng(seed);
  Vocabulary vocab;
  for (int w = 0; w < dims.vocab; ++w) vocab.Add("w" + std::to_string(w));

  ModelSpec spec;
  spec.d_e = dims.d_e;
  spec.d_h = dims.d_h;
  spec.d_p = dims.d_p;
  spec.d_w = dims.d_w;
  spec.max_distance = dims.max_distance;
  spec.pooling = dims.pooling;
  spec.input_dropout = dims.dropout ? 0.3 : 0.0;
  spec.recurrent_dropout = dims.dropout ? 0.3 : 0.0;
  AtpParams params = InitParams(spec, vocab, dims.init_scale, rng);

  ReviewInstance inst;
  DepTree shape = RandomTree(dims.steps, rng);
  std::vector<Token> tokens = shape.tokens();
  // One word outside the vocabulary exercises the UNK row.
  std::uniform_int_distribution<int> word(0, dims.vocab);
  for (Token& t : tokens) t.form = "w" + std::to_string(word(rng));
  inst.tree = DepTree::FromTokens(std::move(tokens));
  std::uniform_int_distribution<int> start(1, dims.steps - dims.aspect_len + 1);
  inst.aspect_span.begin = start(rng);
  inst.aspect_span.end = inst.aspect_span.begin + dims.aspect_len - 1;
  std::uniform_int_distribution<int> label(0, kNumPolarities - 1);
  inst.label = LabelFromCode(label(rng));

  const auto pv = TreePositionVector(inst.tree, inst.aspect_span, dims.max_distance);
  const EncodedInstance enc = Encode(params, inst, pv, dims.steps + dims.pad);
  const std::uint64_t dropout_seed = rng();

  auto loss = [&]() {
    Rng local(dropout_seed);
    const auto trace = Forward(params, enc, dims.dropout, local);
    return CrossEntropy(trace.logits, enc.label).loss;
  };

  params.ZeroGrad();
  {
    Rng local(dropout_seed);
    const auto trace = Forward(params, enc, dims.dropout, local);
    Backward(params, trace, enc.label);
  }
  return GradCheck(loss, params.Named(), eps, tol);
}

}  // namespace atp
