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

// Recurrent and classification building blocks with hand-written backward
// passes, plus RMSprop and a central-difference gradient checker.

#ifndef ATP_NN_H_
#define ATP_NN_H_

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "atp/tensor.h"

namespace atp {

// Gate weights act on the concatenation [x; h_prev] (d_in + d_h columns).
struct LstmCellParams {
  LstmCellParams() = default;
  LstmCellParams(int d_in, int d_h);

  int d_in = 0;
  int d_h = 0;
  Param w_i, w_f, w_o, w_g;
  Param b_i, b_f, b_o, b_g;  // 1 x d_h

  // Uniform(-scale, scale) weights and biases; forget bias set to 1.
  void Init(double scale, Rng& rng);
  std::vector<std::pair<std::string, Param*>> Named(const std::string& prefix);
};

struct LstmCache {
  Vec x, h_prev, c_prev;
  Vec i, f, o, g, c, tanh_c;
};

struct LstmStep {
  Vec h;
  Vec c;
  LstmCache cache;
};

LstmStep LstmCellForward(const LstmCellParams& p, std::span<const double> x,
                         std::span<const double> h_prev,
                         std::span<const double> c_prev);

struct LstmGrads {
  Vec dx, dh_prev, dc_prev;
};

// Accumulates parameter gradients into p.
LstmGrads LstmCellBackward(LstmCellParams& p, const LstmCache& cache,
                           std::span<const double> dh, std::span<const double> dc);

// One direction over a sequence. Masked steps do not touch the cell: state
// is carried through unchanged and the step output is the carried h.
struct LstmRun {
  bool reversed = false;
  std::vector<Vec> outputs;              // per position
  std::vector<LstmCache> caches;         // per position, valid where mask
  Vec recurrent_mask;                    // applied to h_prev at every step
};

LstmRun LstmRunForward(const LstmCellParams& p, const std::vector<Vec>& xs,
                       const std::vector<bool>& mask, bool reversed,
                       Vec recurrent_mask = {});

// Returns dx per position (zero at masked positions).
std::vector<Vec> LstmRunBackward(LstmCellParams& p, const LstmRun& run,
                                 const std::vector<bool>& mask,
                                 const std::vector<Vec>& d_outputs);

struct BiLstmTrace {
  LstmRun fwd;
  LstmRun bwd;
  std::vector<Vec> outputs;  // [h_fwd; h_bwd], 2 d_h each
};

BiLstmTrace BiLstmForward(const LstmCellParams& fwd, const LstmCellParams& bwd,
                          const std::vector<Vec>& xs, const std::vector<bool>& mask,
                          Vec fwd_recurrent_mask = {}, Vec bwd_recurrent_mask = {});

std::vector<Vec> BiLstmBackward(LstmCellParams& fwd, LstmCellParams& bwd,
                                const BiLstmTrace& trace,
                                const std::vector<bool>& mask,
                                const std::vector<Vec>& d_outputs);

Vec Softmax(std::span<const double> v);

// Softmax over entries where mask is true; masked entries are exactly 0.
Vec MaskedSoftmax(std::span<const double> v, const std::vector<bool>& mask);

struct CrossEntropyResult {
  double loss = 0.0;
  Vec dlogits;
};

CrossEntropyResult CrossEntropy(std::span<const double> logits, int gold);

// Inverted-dropout mask: entries 0 with probability `rate`, else 1/(1-rate).
// All ones when not training. Throws kBadRate unless 0 <= rate < 1.
Vec DropoutMask(std::size_t n, double rate, bool training, Rng& rng);
Vec Dropout(std::span<const double> v, double rate, bool training, Rng& rng);

void RmspropStep(Param& p, double lr, double rho, double eps);

struct GradCheckBlock {
  std::string name;
  std::size_t entries = 0;
  std::size_t failures = 0;
  double max_error = 0.0;
  bool passed() const { return failures == 0; }
};

struct GradCheckReport {
  std::vector<GradCheckBlock> blocks;
  bool passed() const;
};

// Compares the analytic gradients already stored in each Param against
// central differences of `loss`. The error measure per entry is
// |analytic - numeric| / max(1, |analytic| + |numeric|).
GradCheckReport GradCheck(const std::function<double()>& loss,
                          const std::vector<std::pair<std::string, Param*>>& params,
                          double eps = 1e-5, double tol = 1e-4);

}  // namespace atp

#endif  // ATP_NN_H_
