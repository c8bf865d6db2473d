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

#include "atp/training.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "atp/error.h"
#include "json.hpp"

namespace atp {

std::string ToJsonLine(const EpochReport& r) {
  nlohmann::json j;
  j["epoch"] = r.epoch;
  j["train_loss"] = r.train_loss;
  j["train_accuracy"] = r.train_accuracy;
  j["dev_accuracy"] = r.dev_accuracy;
  nlohmann::json per_class;
  for (PolarityLabel label : kAllPolarities) {
    per_class[std::string(PolarityName(label))] = r.dev_per_class[LabelCode(label)];
  }
  j["dev_per_class"] = per_class;
  j["lr"] = r.lr;
  return j.dump();
}

std::string ToJson(const EvalResult& r) {
  nlohmann::json j;
  j["total"] = r.total;
  j["correct"] = r.correct;
  j["accuracy"] = r.accuracy;
  j["macro_accuracy"] = r.macro_accuracy;
  nlohmann::json per_class;
  for (PolarityLabel label : kAllPolarities) {
    const int k = LabelCode(label);
    per_class[std::string(PolarityName(label))] = {
        {"count", r.class_counts[k]}, {"accuracy", r.per_class_accuracy[k]}};
  }
  j["per_class"] = per_class;
  j["confusion"] = r.confusion;
  return j.dump();
}

PositionVector ComputePositions(const ReviewInstance& inst, PositionMode mode,
                                int clamp) {
  if (mode == PositionMode::kWordOffset) {
    return WordOffsetVector(inst.tree.size(), inst.aspect_span, clamp);
  }
  return TreePositionVector(inst.tree, inst.aspect_span, clamp);
}

std::vector<EncodedInstance> EncodeAll(const AtpParams& params,
                                       const std::vector<ReviewInstance>& data,
                                       PositionMode mode) {
  std::vector<EncodedInstance> out;
  out.reserve(data.size());
  for (const auto& inst : data) {
    const auto pv = ComputePositions(inst, mode, params.pos.max_distance);
    out.push_back(Encode(params, inst, pv, inst.tree.size()));
  }
  return out;
}

EvalResult EvaluateEncoded(const AtpParams& params,
                           const std::vector<EncodedInstance>& data) {
  EvalResult r;
  for (const auto& inst : data) {
    const int predicted = LabelCode(Predict(params, inst).label);
    ++r.confusion[inst.label][predicted];
    ++r.class_counts[inst.label];
    ++r.total;
    if (predicted == inst.label) ++r.correct;
  }
  r.accuracy = r.total == 0 ? 0.0 : static_cast<double>(r.correct) / r.total;
  int present = 0;
  double sum = 0.0;
  for (int k = 0; k < kNumPolarities; ++k) {
    if (r.class_counts[k] == 0) continue;
    r.per_class_accuracy[k] =
        static_cast<double>(r.confusion[k][k]) / r.class_counts[k];
    sum += r.per_class_accuracy[k];
    ++present;
  }
  r.macro_accuracy = present == 0 ? 0.0 : sum / present;
  return r;
}

EvalResult Evaluate(const AtpParams& params, const std::vector<ReviewInstance>& data,
                    PositionMode mode) {
  return EvaluateEncoded(params, EncodeAll(params, data, mode));
}

PolarityLabel MajorityLabel(const std::vector<ReviewInstance>& data) {
  std::array<int, kNumPolarities> counts{};
  for (const auto& inst : data) ++counts[LabelCode(inst.label)];
  return LabelFromCode(static_cast<int>(
      std::max_element(counts.begin(), counts.end()) - counts.begin()));
}

double MajorityAccuracy(const std::vector<ReviewInstance>& data, PolarityLabel label) {
  if (data.empty()) return 0.0;
  const auto hits = std::count_if(data.begin(), data.end(),
                                  [&](const ReviewInstance& i) { return i.label == label; });
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

int DefaultUpsampleTarget(const std::vector<ReviewInstance>& data) {
  std::array<int, kNumPolarities> counts{};
  for (const auto& inst : data) ++counts[LabelCode(inst.label)];
  std::array<int, 3> others = {counts[0], counts[1], counts[2]};
  std::sort(others.begin(), others.end());
  return std::max(others[1], counts[LabelCode(PolarityLabel::kConflict)]);
}

std::vector<ReviewInstance> UpsampleConflict(std::vector<ReviewInstance> data,
                                             int target, Rng& rng) {
  std::vector<std::size_t> conflict;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].label == PolarityLabel::kConflict) conflict.push_back(i);
  }
  const int current = static_cast<int>(conflict.size());
  if (target > 0 && current == 0) {
    throw Error(ErrorCode::kNoConflictInstances,
                "cannot upsample: no conflict instances");
  }
  if (target < current) {
    throw Error(ErrorCode::kBadConfig,
                "upsample target " + std::to_string(target) + " is below the " +
                    std::to_string(current) + " conflict instances present");
  }
  std::uniform_int_distribution<std::size_t> pick(0, conflict.empty() ? 0 : conflict.size() - 1);
  data.reserve(data.size() + (target - current));
  for (int k = current; k < target; ++k) {
    // Copy first: push_back may reallocate.
    ReviewInstance copy = data[conflict[pick(rng)]];
    data.push_back(std::move(copy));
  }
  std::shuffle(data.begin(), data.end(), rng);
  return data;
}

EncodedInstance PadTo(const EncodedInstance& inst, int pad_to, int pad_position) {
  EncodedInstance out = inst;
  const auto steps = static_cast<std::size_t>(std::max<int>(pad_to, inst.word_ids.size()));
  out.word_ids.resize(steps, Vocabulary::kPad);
  out.position_ids.resize(steps, pad_position);
  out.mask.resize(steps, false);
  return out;
}

std::vector<Batch> MakeBatches(const std::vector<EncodedInstance>& data,
                               int batch_size, int pad_to, int pad_position,
                               Rng& rng) {
  if (batch_size < 1) throw Error(ErrorCode::kBadConfig, "batch_size must be positive");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Batch> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    Batch batch;
    const std::size_t end = std::min(order.size(), start + batch_size);
    for (std::size_t k = start; k < end; ++k) {
      batch.push_back(PadTo(data[order[k]], pad_to, pad_position));
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

double LrSchedule(double lr0, double factor, int patience, int epoch) {
  return lr0 * std::pow(factor, epoch / patience);
}

Vocabulary BuildVocabulary(const std::vector<ReviewInstance>& data, bool lowercase) {
  Vocabulary vocab(lowercase);
  for (const auto& inst : data) {
    for (const Token& t : inst.tree.tokens()) vocab.Add(t.form);
  }
  return vocab;
}

namespace {

// Splits a line on spaces/tabs.
std::vector<std::string_view> Fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename F>
void ForEachVectorLine(std::string_view text, F&& f) {
  std::size_t start = 0;
  bool first = true;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto fields = Fields(text.substr(start, end - start));
    start = end + 1;
    if (fields.empty()) continue;
    // word2vec text files open with "count dim".
    if (first && fields.size() == 2) {
      first = false;
      continue;
    }
    first = false;
    if (!f(fields)) return;
  }
}

double ParseDouble(std::string_view s) {
  // strtod needs a terminated buffer.
  std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::kMalformedLine, "bad embedding value '" + buf + "'");
  }
  return v;
}

}  // namespace

int TextEmbeddingDim(std::string_view text) {
  int dim = 0;
  ForEachVectorLine(text, [&](const std::vector<std::string_view>& fields) {
    dim = static_cast<int>(fields.size()) - 1;
    return false;
  });
  if (dim < 1) throw Error(ErrorCode::kMalformedLine, "embedding file has no vectors");
  return dim;
}

int LoadTextEmbeddings(std::string_view text, EmbeddingTable& table) {
  const int dim = table.dim();
  std::vector<bool> filled(table.vocab.size(), false);
  int count = 0;
  ForEachVectorLine(text, [&](const std::vector<std::string_view>& fields) {
    if (static_cast<int>(fields.size()) != dim + 1) {
      throw Error(ErrorCode::kMalformedLine,
                  "embedding for '" + std::string(fields[0]) + "' has " +
                      std::to_string(fields.size() - 1) + " values, expected " +
                      std::to_string(dim));
    }
    const int id = table.vocab.Lookup(fields[0]);
    if (id == Vocabulary::kUnk || id == Vocabulary::kPad || filled[id]) return true;
    auto row = table.table.value.row(id);
    for (int j = 0; j < dim; ++j) row[j] = ParseDouble(fields[j + 1]);
    filled[id] = true;
    ++count;
    return true;
  });
  return count;
}

TrainResult Train(TrainConfig config, const std::vector<ReviewInstance>& train,
                  const std::vector<ReviewInstance>* dev, const TrainOptions& options) {
  if (!options.embeddings_text.empty()) {
    config.d_e = TextEmbeddingDim(options.embeddings_text);
  }
  config.Validate();
  if (train.empty()) throw Error(ErrorCode::kCountMismatch, "training set is empty");
  Rng rng(config.seed);

  TrainResult result;
  std::vector<ReviewInstance> train_part;
  if (dev != nullptr) {
    train_part = train;
    result.dev = *dev;
  } else {
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_dev =
        static_cast<std::size_t>(std::floor(config.dev_fraction * train.size()));
    for (std::size_t k = 0; k < order.size(); ++k) {
      (k < n_dev ? result.dev : train_part).push_back(train[order[k]]);
    }
  }

  int target = config.upsample_target;
  if (target == -1) {
    const bool has_conflict =
        std::any_of(train_part.begin(), train_part.end(), [](const ReviewInstance& i) {
          return i.label == PolarityLabel::kConflict;
        });
    target = has_conflict ? DefaultUpsampleTarget(train_part) : 0;
  }
  if (target > 0) train_part = UpsampleConflict(std::move(train_part), target, rng);

  if (config.max_len == 0) {
    for (const auto& inst : train_part) {
      config.max_len = std::max(config.max_len, inst.tree.size());
    }
  }

  AtpParams params = InitParams(config.ToModelSpec(),
                                BuildVocabulary(train_part, config.lowercase),
                                config.init_scale, rng);
  if (!options.embeddings_text.empty()) {
    LoadTextEmbeddings(options.embeddings_text, params.word);
  }
  params.ZeroGrad();

  const auto train_enc = EncodeAll(params, train_part, config.position_mode);
  const auto dev_enc = EncodeAll(params, result.dev, config.position_mode);
  const int pad_position = params.pos.pad_index();

  double best_dev = -1.0;
  result.params = params;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr =
        LrSchedule(config.lr, config.lr_factor, config.lr_patience, epoch);
    double loss_sum = 0.0;
    for (const Batch& batch : MakeBatches(train_enc, config.batch_size,
                                          config.max_len, pad_position, rng)) {
      const double weight = 1.0 / static_cast<double>(batch.size());
      for (const EncodedInstance& item : batch) {
        const ForwardTrace trace = Forward(params, item, /*training=*/true, rng);
        const double loss = Backward(params, trace, item.label, weight);
        if (!std::isfinite(loss)) {
          throw Error(ErrorCode::kDivergenceDetected,
                      "non-finite loss at epoch " + std::to_string(epoch));
        }
        loss_sum += loss;
      }
      for (auto& [name, p] : params.Named()) {
        if (config.freeze_embeddings && p == &params.word.table) continue;
        RmspropStep(*p, lr, config.rms_rho, config.rms_eps);
      }
    }

    EpochReport report;
    report.epoch = epoch;
    report.lr = lr;
    report.train_loss = loss_sum / static_cast<double>(train_enc.size());
    report.train_accuracy = EvaluateEncoded(params, train_enc).accuracy;
    if (!dev_enc.empty()) {
      const EvalResult dev_eval = EvaluateEncoded(params, dev_enc);
      report.dev_accuracy = dev_eval.accuracy;
      report.dev_per_class = dev_eval.per_class_accuracy;
    }
    result.reports.push_back(report);
    if (options.on_epoch) options.on_epoch(report);

    if (dev_enc.empty() || report.dev_accuracy > best_dev) {
      best_dev = report.dev_accuracy;
      result.best_epoch = epoch;
      result.params = params;
    }
  }
  result.config = config;
  return result;
}

}  // namespace atp
