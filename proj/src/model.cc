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

#include "atp/model.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "atp/error.h"

namespace atp {
namespace {

void CheckSameLength(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": lengths " + std::to_string(a) + " and " +
                    std::to_string(b) + " differ");
  }
}

}  // namespace

std::string_view PoolingName(AspectPooling pooling) {
  switch (pooling) {
    case AspectPooling::kMean: return "mean";
    case AspectPooling::kSum: return "sum";
    case AspectPooling::kHead: return "head";
  }
  return "?";
}

AspectPooling ParsePooling(std::string_view name) {
  for (AspectPooling p : {AspectPooling::kMean, AspectPooling::kSum, AspectPooling::kHead}) {
    if (name == PoolingName(p)) return p;
  }
  throw Error(ErrorCode::kBadConfig,
              "unknown aspect pooling '" + std::string(name) + "'");
}

Vocabulary::Vocabulary(bool lowercase) : lowercase_(lowercase) {
  words_ = {"<pad>", "<unk>"};
  ids_ = {{"<pad>", kPad}, {"<unk>", kUnk}};
}

std::string Vocabulary::Normalize(std::string_view word) const {
  std::string out(word);
  if (lowercase_) {
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
  }
  return out;
}

int Vocabulary::Add(std::string_view word) {
  std::string key = Normalize(word);
  auto [it, inserted] = ids_.try_emplace(key, size());
  if (inserted) words_.push_back(std::move(key));
  return it->second;
}

int Vocabulary::Lookup(std::string_view word) const {
  auto it = ids_.find(Normalize(word));
  return it == ids_.end() ? kUnk : it->second;
}

std::vector<std::pair<std::string, Param*>> AtpParams::Named() {
  std::vector<std::pair<std::string, Param*>> out = {
      {"word_embedding", &word.table},
      {"position_embedding", &pos.table},
  };
  for (auto& entry : fwd.Named("lstm_fwd")) out.push_back(entry);
  for (auto& entry : bwd.Named("lstm_bwd")) out.push_back(entry);
  out.emplace_back("attention.w_hpa", &attn.w_hpa);
  out.emplace_back("attention.w_s", &attn.w_s);
  out.emplace_back("classifier.w", &classifier_w);
  out.emplace_back("classifier.b", &classifier_b);
  return out;
}

std::vector<std::pair<std::string, const Param*>> AtpParams::Named() const {
  std::vector<std::pair<std::string, const Param*>> out;
  for (auto& [name, p] : const_cast<AtpParams*>(this)->Named()) {
    out.emplace_back(name, p);
  }
  return out;
}

void AtpParams::ZeroGrad() {
  for (auto& [name, p] : Named()) p->ZeroGrad();
}

AtpParams InitParams(const ModelSpec& spec, Vocabulary vocab, double init_scale,
                     Rng& rng) {
  if (spec.d_e < 1 || spec.d_h < 1 || spec.d_p < 1 || spec.d_w < 1 ||
      spec.max_distance < 1) {
    throw Error(ErrorCode::kBadConfig, "model dimensions must be positive");
  }
  AtpParams p;
  p.spec = spec;
  const int vocab_size = vocab.size();
  p.word.vocab = std::move(vocab);
  p.word.table = Param(vocab_size, spec.d_e);
  p.pos.max_distance = spec.max_distance;
  p.pos.table = Param(spec.max_distance + 2, spec.d_p);
  p.fwd = LstmCellParams(spec.d_e, spec.d_h);
  p.bwd = LstmCellParams(spec.d_e, spec.d_h);
  p.attn.w_hpa = Param(spec.d_w, 2 * spec.d_h + spec.d_p + spec.d_e);
  p.attn.w_s = Param(1, spec.d_w);
  p.classifier_w = Param(kNumPolarities, 2 * spec.d_h);
  p.classifier_b = Param(1, kNumPolarities);

  InitUniform(p.word.table.value, init_scale, rng);
  std::fill(p.word.table.value.row(Vocabulary::kPad).begin(),
            p.word.table.value.row(Vocabulary::kPad).end(), 0.0);
  InitUniform(p.pos.table.value, init_scale, rng);
  p.fwd.Init(init_scale, rng);
  p.bwd.Init(init_scale, rng);
  InitUniform(p.attn.w_hpa.value, init_scale, rng);
  InitUniform(p.attn.w_s.value, init_scale, rng);
  InitUniform(p.classifier_w.value, init_scale, rng);
  InitUniform(p.classifier_b.value, init_scale, rng);
  return p;
}

EncodedInstance Encode(const AtpParams& params, const ReviewInstance& inst,
                       const PositionVector& pv, int pad_to) {
  const DepTree& tree = inst.tree;
  const int n = tree.size();
  CheckSameLength(pv.dists.size(), n, "position vector vs sentence");
  if (pv.clamp != params.pos.max_distance) {
    throw Error(ErrorCode::kDimensionMismatch,
                "position vector clamp " + std::to_string(pv.clamp) +
                    " differs from model max distance " +
                    std::to_string(params.pos.max_distance));
  }
  const TokenSpan span = inst.aspect_span;
  if (span.begin < 1 || span.begin > span.end || span.end > n) {
    throw Error(ErrorCode::kEmptyAspect, "aspect span outside the sentence");
  }
  const int length = std::max(pad_to, n);

  EncodedInstance enc;
  enc.length = n;
  enc.label = LabelCode(inst.label);
  enc.position_ids = ToEmbeddingIndices(pv, length);
  enc.word_ids.assign(length, Vocabulary::kPad);
  enc.mask.assign(length, false);
  for (int k = 1; k <= n; ++k) {
    enc.word_ids[k - 1] = params.word.vocab.Lookup(tree.token(k).form);
    enc.mask[k - 1] = true;
  }
  for (int k = span.begin; k <= span.end; ++k) {
    enc.aspect_ids.push_back(enc.word_ids[k - 1]);
  }
  for (int k = span.begin; k <= span.end; ++k) {
    if (!span.Contains(tree.token(k).head)) {
      enc.aspect_head = k - span.begin;
      break;
    }
  }
  return enc;
}

Vec AspectVector(const EmbeddingTable& table, std::span<const int> aspect_ids,
                 AspectPooling pooling, int head_offset) {
  if (aspect_ids.empty()) throw Error(ErrorCode::kEmptyAspect, "aspect has no tokens");
  Vec out(table.dim(), 0.0);
  switch (pooling) {
    case AspectPooling::kHead:
      if (head_offset < 0 || head_offset >= static_cast<int>(aspect_ids.size())) {
        throw Error(ErrorCode::kIndexOutOfRange, "aspect head offset out of range");
      }
      Axpy(1.0, table.table.value.row(aspect_ids[head_offset]), out);
      break;
    case AspectPooling::kSum:
    case AspectPooling::kMean: {
      for (int id : aspect_ids) Axpy(1.0, table.table.value.row(id), out);
      if (pooling == AspectPooling::kMean) {
        const double inv = 1.0 / static_cast<double>(aspect_ids.size());
        for (double& v : out) v *= inv;
      }
      break;
    }
  }
  return out;
}

AttentionScores ComputeAttentionScores(const std::vector<Vec>& h,
                                       const std::vector<Vec>& p,
                                       std::span<const double> a,
                                       const AttentionParams& params,
                                       const std::vector<bool>& mask) {
  CheckSameLength(h.size(), p.size(), "attention h vs p");
  CheckSameLength(h.size(), mask.size(), "attention h vs mask");
  const Tensor2& w = params.w_hpa.value;
  const int d_w = w.rows();
  if (params.w_s.value.cols() != d_w) {
    throw Error(ErrorCode::kDimensionMismatch, "w_s width differs from W_hpa rows");
  }
  const std::size_t steps = h.size();
  AttentionScores out;
  out.scores.assign(steps, -std::numeric_limits<double>::infinity());
  out.tanh_z.resize(steps);
  if (steps == 0) return out;

  const std::size_t d_hh = h.front().size();
  const std::size_t d_p = p.front().size();
  if (d_hh + d_p + a.size() != static_cast<std::size_t>(w.cols())) {
    throw Error(ErrorCode::kDimensionMismatch,
                "W_hpa has " + std::to_string(w.cols()) + " columns, inputs give " +
                    std::to_string(d_hh + d_p + a.size()));
  }
  // The aspect term is shared across timesteps.
  Vec za(d_w, 0.0);
  MatVecAddCols(w, static_cast<int>(d_hh + d_p), a, za);

  for (std::size_t t = 0; t < steps; ++t) {
    if (!mask[t]) continue;
    CheckSameLength(h[t].size(), d_hh, "attention h_t");
    CheckSameLength(p[t].size(), d_p, "attention p_t");
    Vec z = za;
    MatVecAddCols(w, 0, h[t], z);
    MatVecAddCols(w, static_cast<int>(d_hh), p[t], z);
    for (double& v : z) v = std::tanh(v);
    out.scores[t] = Dot(params.w_s.value.row(0), z);
    out.tanh_z[t] = std::move(z);
  }
  return out;
}

Vec AttentionWeights(std::span<const double> scores, const std::vector<bool>& mask) {
  return MaskedSoftmax(scores, mask);
}

Vec ContextVector(std::span<const double> alpha, const std::vector<Vec>& h) {
  CheckSameLength(alpha.size(), h.size(), "context alpha vs h");
  Vec c(h.empty() ? 0 : h.front().size(), 0.0);
  for (std::size_t t = 0; t < h.size(); ++t) {
    if (alpha[t] == 0.0) continue;
    Axpy(alpha[t], h[t], c);
  }
  return c;
}

ForwardTrace Forward(const AtpParams& params, const EncodedInstance& input,
                     bool training, Rng& rng) {
  const std::size_t steps = input.word_ids.size();
  CheckSameLength(steps, input.mask.size(), "word ids vs mask");
  CheckSameLength(steps, input.position_ids.size(), "word ids vs position ids");
  const int d_e = params.word.dim();
  const int vocab = params.word.vocab.size();
  const int pos_rows = params.pos.table.value.rows();

  ForwardTrace tr;
  tr.input = input;
  tr.input_dropout.resize(steps);
  tr.xs.assign(steps, Vec(d_e, 0.0));
  tr.positions.resize(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    const int wid = input.word_ids[t];
    const int pid = input.position_ids[t];
    if (wid < 0 || wid >= vocab || pid < 0 || pid >= pos_rows) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "embedding index out of range at step " + std::to_string(t));
    }
    const auto prow = params.pos.table.value.row(pid);
    tr.positions[t].assign(prow.begin(), prow.end());
    if (!input.mask[t]) continue;
    tr.input_dropout[t] =
        DropoutMask(d_e, params.spec.input_dropout, training, rng);
    const auto wrow = params.word.table.value.row(wid);
    for (int j = 0; j < d_e; ++j) tr.xs[t][j] = wrow[j] * tr.input_dropout[t][j];
  }
  Vec rec_f = DropoutMask(params.spec.d_h, params.spec.recurrent_dropout, training, rng);
  Vec rec_b = DropoutMask(params.spec.d_h, params.spec.recurrent_dropout, training, rng);
  tr.lstm = BiLstmForward(params.fwd, params.bwd, tr.xs, input.mask,
                          std::move(rec_f), std::move(rec_b));
  tr.aspect = AspectVector(params.word, input.aspect_ids, params.spec.pooling,
                           input.aspect_head);
  tr.scores = ComputeAttentionScores(tr.lstm.outputs, tr.positions, tr.aspect,
                                     params.attn, input.mask);
  tr.alpha = AttentionWeights(tr.scores.scores, input.mask);
  tr.context = ContextVector(tr.alpha, tr.lstm.outputs);
  const auto bias = params.classifier_b.value.row(0);
  tr.logits.assign(bias.begin(), bias.end());
  MatVecAdd(params.classifier_w.value, tr.context, tr.logits);
  return tr;
}

double Backward(AtpParams& params, const ForwardTrace& tr, int gold, double weight) {
  const auto ce = CrossEntropy(tr.logits, gold);
  Vec dlogits = ce.dlogits;
  for (double& v : dlogits) v *= weight;

  OuterAddCols(params.classifier_w.grad, 0, dlogits, tr.context);
  Axpy(1.0, dlogits, params.classifier_b.grad.flat());
  Vec dc(tr.context.size(), 0.0);
  MatTVecAddCols(params.classifier_w.value, 0, dlogits, dc);

  const std::size_t steps = tr.alpha.size();
  const auto& h = tr.lstm.outputs;
  const auto& mask = tr.input.mask;
  std::vector<Vec> dh(steps, Vec(dc.size(), 0.0));
  Vec dalpha(steps, 0.0);
  double weighted = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    if (!mask[t]) continue;
    Axpy(tr.alpha[t], dc, dh[t]);
    dalpha[t] = Dot(h[t], dc);
    weighted += tr.alpha[t] * dalpha[t];
  }

  Tensor2& w = params.attn.w_hpa.value;
  Tensor2& gw = params.attn.w_hpa.grad;
  const int d_hh = static_cast<int>(dc.size());
  const int d_p = params.pos.dim();
  const auto w_s = params.attn.w_s.value.row(0);
  Vec dz(w.rows());
  Vec dz_sum(w.rows(), 0.0);
  Vec dp(d_p);
  for (std::size_t t = 0; t < steps; ++t) {
    if (!mask[t]) continue;
    const double ds = tr.alpha[t] * (dalpha[t] - weighted);
    const Vec& tz = tr.scores.tanh_z[t];
    Axpy(ds, tz, params.attn.w_s.grad.row(0));
    for (int r = 0; r < w.rows(); ++r) dz[r] = ds * w_s[r] * (1.0 - tz[r] * tz[r]);
    OuterAddCols(gw, 0, dz, h[t]);
    OuterAddCols(gw, d_hh, dz, tr.positions[t]);
    MatTVecAddCols(w, 0, dz, dh[t]);
    std::fill(dp.begin(), dp.end(), 0.0);
    MatTVecAddCols(w, d_hh, dz, dp);
    Axpy(1.0, dp, params.pos.table.grad.row(tr.input.position_ids[t]));
    Axpy(1.0, dz, dz_sum);
  }
  OuterAddCols(gw, d_hh + d_p, dz_sum, tr.aspect);
  Vec da(tr.aspect.size(), 0.0);
  MatTVecAddCols(w, d_hh + d_p, dz_sum, da);

  const auto dxs = BiLstmBackward(params.fwd, params.bwd, tr.lstm, mask, dh);

  if (!params.spec.freeze_embeddings) {
    Tensor2& gword = params.word.table.grad;
    const int d_e = params.word.dim();
    for (std::size_t t = 0; t < steps; ++t) {
      const int wid = tr.input.word_ids[t];
      if (!mask[t] || wid == Vocabulary::kPad) continue;
      auto row = gword.row(wid);
      for (int j = 0; j < d_e; ++j) row[j] += dxs[t][j] * tr.input_dropout[t][j];
    }
    const auto& ids = tr.input.aspect_ids;
    switch (params.spec.pooling) {
      case AspectPooling::kHead:
        if (ids[tr.input.aspect_head] != Vocabulary::kPad) {
          Axpy(1.0, da, gword.row(ids[tr.input.aspect_head]));
        }
        break;
      case AspectPooling::kSum:
      case AspectPooling::kMean: {
        const double scale = params.spec.pooling == AspectPooling::kMean
                                 ? 1.0 / static_cast<double>(ids.size())
                                 : 1.0;
        for (int id : ids) {
          if (id != Vocabulary::kPad) Axpy(scale, da, gword.row(id));
        }
        break;
      }
    }
  }
  return ce.loss;
}

int ArgmaxClass(std::span<const double> logits) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(logits.size()); ++k) {
    if (logits[k] > logits[best]) best = k;
  }
  return best;
}

Prediction Predict(const AtpParams& params, const EncodedInstance& input) {
  Rng unused(0);
  const ForwardTrace tr = Forward(params, input, /*training=*/false, unused);
  Prediction out;
  out.label = LabelFromCode(ArgmaxClass(tr.logits));
  out.probabilities = Softmax(tr.logits);
  out.alpha.assign(tr.alpha.begin(), tr.alpha.begin() + input.length);
  return out;
}

Prediction Predict(const AtpParams& params, const ReviewInstance& inst,
                   const PositionVector& pv) {
  return Predict(params, Encode(params, inst, pv, inst.tree.size()));
}

}  // namespace atp
