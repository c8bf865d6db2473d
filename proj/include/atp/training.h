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

#ifndef ATP_TRAINING_H_
#define ATP_TRAINING_H_

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "atp/config.h"
#include "atp/ingest.h"
#include "atp/model.h"

namespace atp {

struct EpochReport {
  int epoch = 0;
  double train_loss = 0.0;  // mean over training instances
  double train_accuracy = 0.0;
  double dev_accuracy = 0.0;
  std::array<double, kNumPolarities> dev_per_class{};
  double lr = 0.0;
};

std::string ToJsonLine(const EpochReport& report);

struct EvalResult {
  int total = 0;
  int correct = 0;
  double accuracy = 0.0;
  // Recall per gold class; 0 for classes with no instances.
  std::array<double, kNumPolarities> per_class_accuracy{};
  std::array<int, kNumPolarities> class_counts{};
  // Mean of per_class_accuracy over classes that occur.
  double macro_accuracy = 0.0;
  // confusion[gold][predicted]
  std::array<std::array<int, kNumPolarities>, kNumPolarities> confusion{};
};

std::string ToJson(const EvalResult& result);

PositionVector ComputePositions(const ReviewInstance& inst, PositionMode mode,
                                int clamp);

// Encodes without padding.
std::vector<EncodedInstance> EncodeAll(const AtpParams& params,
                                       const std::vector<ReviewInstance>& data,
                                       PositionMode mode);

EvalResult EvaluateEncoded(const AtpParams& params,
                           const std::vector<EncodedInstance>& data);
EvalResult Evaluate(const AtpParams& params, const std::vector<ReviewInstance>& data,
                    PositionMode mode);

// Most frequent label in `data`, ties toward the lower code.
PolarityLabel MajorityLabel(const std::vector<ReviewInstance>& data);
double MajorityAccuracy(const std::vector<ReviewInstance>& data, PolarityLabel label);

// Median of the three non-conflict class sizes, never below the current
// conflict count.
int DefaultUpsampleTarget(const std::vector<ReviewInstance>& data);

// Duplicates conflict instances (sampling with replacement) until there are
// `target` of them, then shuffles.
std::vector<ReviewInstance> UpsampleConflict(std::vector<ReviewInstance> data,
                                             int target, Rng& rng);

// Copy of `inst` padded with PAD words/positions to `pad_to` steps.
EncodedInstance PadTo(const EncodedInstance& inst, int pad_to, int pad_position);

using Batch = std::vector<EncodedInstance>;

// Shuffled batches of `batch_size` (the last may be short), each item padded
// to `pad_to`.
std::vector<Batch> MakeBatches(const std::vector<EncodedInstance>& data,
                               int batch_size, int pad_to, int pad_position,
                               Rng& rng);

// lr0 * factor^floor(epoch / patience).
double LrSchedule(double lr0, double factor, int patience, int epoch);

Vocabulary BuildVocabulary(const std::vector<ReviewInstance>& data, bool lowercase);

// Reads whitespace-separated "word v1 ... vd" lines (an optional leading
// "count dim" line is skipped) and copies vectors into the rows of words
// present in the table's vocabulary. Returns the number of rows filled.
int LoadTextEmbeddings(std::string_view text, EmbeddingTable& table);
// Dimension of the first vector line.
int TextEmbeddingDim(std::string_view text);

struct TrainOptions {
  std::string embeddings_text;  // optional pretrained vectors
  std::function<void(const EpochReport&)> on_epoch;
};

struct TrainResult {
  TrainConfig config;  // with max_len and d_e resolved
  AtpParams params;    // best-dev-accuracy epoch (last epoch without dev data)
  std::vector<EpochReport> reports;
  int best_epoch = 0;
  std::vector<ReviewInstance> dev;
};

// With `dev` null, config.dev_fraction of `train` is held out (seeded).
// Throws kDivergenceDetected when a loss becomes non-finite.
TrainResult Train(TrainConfig config, const std::vector<ReviewInstance>& train,
                  const std::vector<ReviewInstance>* dev = nullptr,
                  const TrainOptions& options = {});

}  // namespace atp

#endif  // ATP_TRAINING_H_
