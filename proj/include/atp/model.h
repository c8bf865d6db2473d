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

// Bi-LSTM with attention conditioned on dependency-distance position
// embeddings and the aspect embedding, followed by a 4-way classifier.
//
// For each timestep t with Bi-LSTM state h_t, position embedding p_t and
// pooled aspect embedding a:
//
//   score_t = w_s . tanh(W_hpa [h_t; p_t; a])
//   alpha   = softmax(score) over unpadded steps
//   c       = sum_t alpha_t h_t
//   logits  = W_c c + b_c

#ifndef ATP_MODEL_H_
#define ATP_MODEL_H_

#include <array>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "atp/dep_position.h"
#include "atp/ingest.h"
#include "atp/nn.h"
#include "atp/tensor.h"

namespace atp {

enum class AspectPooling { kMean, kSum, kHead };

std::string_view PoolingName(AspectPooling pooling);
// Throws kBadConfig.
AspectPooling ParsePooling(std::string_view name);

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  explicit Vocabulary(bool lowercase = true);

  // Returns the id of `word`, adding it if new.
  int Add(std::string_view word);
  int Lookup(std::string_view word) const;
  int size() const { return static_cast<int>(words_.size()); }
  const std::string& word(int id) const { return words_[id]; }
  const std::vector<std::string>& words() const { return words_; }
  bool lowercase() const { return lowercase_; }

  std::string Normalize(std::string_view word) const;

 private:
  bool lowercase_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> ids_;
};

struct EmbeddingTable {
  Vocabulary vocab;
  Param table;  // vocab.size() x dim; the PAD row stays zero

  int dim() const { return table.value.cols(); }
};

struct PositionTable {
  int max_distance = kDefaultMaxDistance;
  Param table;  // (max_distance + 2) x dim; last row is PAD

  int dim() const { return table.value.cols(); }
  int pad_index() const { return max_distance + 1; }
};

struct AttentionParams {
  Param w_hpa;  // d_w x (2 d_h + d_p + d_e), columns ordered [h; p; a]
  Param w_s;    // 1 x d_w
};

struct ModelSpec {
  int d_e = 100;
  int d_h = 150;
  int d_p = 50;
  int d_w = 100;
  int max_distance = kDefaultMaxDistance;
  AspectPooling pooling = AspectPooling::kMean;
  double input_dropout = 0.5;
  double recurrent_dropout = 0.5;
  bool freeze_embeddings = false;
};

struct AtpParams {
  ModelSpec spec;
  EmbeddingTable word;
  PositionTable pos;
  LstmCellParams fwd;
  LstmCellParams bwd;
  AttentionParams attn;
  Param classifier_w;  // 4 x 2 d_h
  Param classifier_b;  // 1 x 4

  // Every trainable tensor, in a fixed order used by checkpoints and the
  // optimizer.
  std::vector<std::pair<std::string, Param*>> Named();
  std::vector<std::pair<std::string, const Param*>> Named() const;
  void ZeroGrad();
};

// Allocates all tensors for `vocab` and draws them uniformly from
// [-init_scale, init_scale]; forget biases are 1 and the PAD row is 0.
AtpParams InitParams(const ModelSpec& spec, Vocabulary vocab, double init_scale,
                     Rng& rng);

// Model inputs for one instance, padded to a fixed length.
struct EncodedInstance {
  std::vector<int> word_ids;      // PAD beyond the sentence
  std::vector<int> position_ids;  // PAD index beyond the sentence
  std::vector<bool> mask;         // true on real tokens
  std::vector<int> aspect_ids;    // word ids of the aspect tokens
  int aspect_head = 0;            // offset into aspect_ids of the span's head
  int label = 0;
  int length = 0;                 // real tokens
};

// `pad_to` smaller than the sentence length is raised to the length.
EncodedInstance Encode(const AtpParams& params, const ReviewInstance& inst,
                       const PositionVector& pv, int pad_to);

Vec AspectVector(const EmbeddingTable& table, std::span<const int> aspect_ids,
                 AspectPooling pooling, int head_offset = 0);

struct AttentionScores {
  Vec scores;               // -inf at masked steps
  std::vector<Vec> tanh_z;  // tanh(W_hpa u_t), empty at masked steps
};

AttentionScores ComputeAttentionScores(const std::vector<Vec>& h,
                                       const std::vector<Vec>& p,
                                       std::span<const double> a,
                                       const AttentionParams& params,
                                       const std::vector<bool>& mask);

Vec AttentionWeights(std::span<const double> scores, const std::vector<bool>& mask);

Vec ContextVector(std::span<const double> alpha, const std::vector<Vec>& h);

struct ForwardTrace {
  EncodedInstance input;
  std::vector<Vec> input_dropout;  // per step mask on x_t
  std::vector<Vec> xs;             // word embeddings after dropout
  BiLstmTrace lstm;
  std::vector<Vec> positions;      // p_t
  Vec aspect;                      // a
  AttentionScores scores;
  Vec alpha;
  Vec context;
  Vec logits;
};

ForwardTrace Forward(const AtpParams& params, const EncodedInstance& input,
                     bool training, Rng& rng);

// Cross-entropy of the trace against `gold`, with gradients scaled by
// `weight` accumulated into params. Returns the unscaled loss.
double Backward(AtpParams& params, const ForwardTrace& trace, int gold,
                double weight = 1.0);

struct Prediction {
  PolarityLabel label = PolarityLabel::kPositive;
  Vec probabilities;  // 4
  Vec alpha;          // one per real token
};

// Highest-logit class; ties go to the lower class code.
int ArgmaxClass(std::span<const double> logits);

Prediction Predict(const AtpParams& params, const EncodedInstance& input);
Prediction Predict(const AtpParams& params, const ReviewInstance& inst,
                   const PositionVector& pv);

}  // namespace atp

#endif  // ATP_MODEL_H_
