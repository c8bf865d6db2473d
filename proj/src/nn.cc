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

#include "atp/nn.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "atp/error.h"

namespace atp {
namespace {

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void CheckDim(std::size_t got, int want, const char* what) {
  if (static_cast<int>(got) != want) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": expected " + std::to_string(want) +
                    ", got " + std::to_string(got));
  }
}

}  // namespace

LstmCellParams::LstmCellParams(int d_in_, int d_h_)
    : d_in(d_in_),
      d_h(d_h_),
      w_i(d_h_, d_in_ + d_h_),
      w_f(d_h_, d_in_ + d_h_),
      w_o(d_h_, d_in_ + d_h_),
      w_g(d_h_, d_in_ + d_h_),
      b_i(1, d_h_),
      b_f(1, d_h_),
      b_o(1, d_h_),
      b_g(1, d_h_) {}

void LstmCellParams::Init(double scale, Rng& rng) {
  for (Param* p : {&w_i, &w_f, &w_o, &w_g, &b_i, &b_f, &b_o, &b_g}) {
    InitUniform(p->value, scale, rng);
  }
  b_f.value.Fill(1.0);
}

std::vector<std::pair<std::string, Param*>> LstmCellParams::Named(
    const std::string& prefix) {
  return {{prefix + ".w_i", &w_i}, {prefix + ".w_f", &w_f},
          {prefix + ".w_o", &w_o}, {prefix + ".w_g", &w_g},
          {prefix + ".b_i", &b_i}, {prefix + ".b_f", &b_f},
          {prefix + ".b_o", &b_o}, {prefix + ".b_g", &b_g}};
}

LstmStep LstmCellForward(const LstmCellParams& p, std::span<const double> x,
                         std::span<const double> h_prev,
                         std::span<const double> c_prev) {
  CheckDim(x.size(), p.d_in, "lstm input");
  CheckDim(h_prev.size(), p.d_h, "lstm h_prev");
  CheckDim(c_prev.size(), p.d_h, "lstm c_prev");
  const int d_h = p.d_h;

  auto preactivation = [&](const Param& w, const Param& b) {
    Vec a(b.value.flat().begin(), b.value.flat().end());
    MatVecAddCols(w.value, 0, x, a);
    MatVecAddCols(w.value, p.d_in, h_prev, a);
    return a;
  };

  LstmStep step;
  LstmCache& k = step.cache;
  k.x.assign(x.begin(), x.end());
  k.h_prev.assign(h_prev.begin(), h_prev.end());
  k.c_prev.assign(c_prev.begin(), c_prev.end());
  k.i = preactivation(p.w_i, p.b_i);
  k.f = preactivation(p.w_f, p.b_f);
  k.o = preactivation(p.w_o, p.b_o);
  k.g = preactivation(p.w_g, p.b_g);
  k.c.resize(d_h);
  k.tanh_c.resize(d_h);
  step.h.resize(d_h);
  for (int j = 0; j < d_h; ++j) {
    k.i[j] = Sigmoid(k.i[j]);
    k.f[j] = Sigmoid(k.f[j]);
    k.o[j] = Sigmoid(k.o[j]);
    k.g[j] = std::tanh(k.g[j]);
    k.c[j] = k.f[j] * c_prev[j] + k.i[j] * k.g[j];
    k.tanh_c[j] = std::tanh(k.c[j]);
    step.h[j] = k.o[j] * k.tanh_c[j];
  }
  step.c = k.c;
  return step;
}

LstmGrads LstmCellBackward(LstmCellParams& p, const LstmCache& k,
                           std::span<const double> dh, std::span<const double> dc) {
  const int d_h = p.d_h;
  CheckDim(dh.size(), d_h, "lstm dh");
  CheckDim(dc.size(), d_h, "lstm dc");
  Vec da_i(d_h), da_f(d_h), da_o(d_h), da_g(d_h);
  LstmGrads out;
  out.dc_prev.resize(d_h);
  for (int j = 0; j < d_h; ++j) {
    const double dc_total =
        dc[j] + dh[j] * k.o[j] * (1.0 - k.tanh_c[j] * k.tanh_c[j]);
    da_o[j] = dh[j] * k.tanh_c[j] * k.o[j] * (1.0 - k.o[j]);
    da_i[j] = dc_total * k.g[j] * k.i[j] * (1.0 - k.i[j]);
    da_f[j] = dc_total * k.c_prev[j] * k.f[j] * (1.0 - k.f[j]);
    da_g[j] = dc_total * k.i[j] * (1.0 - k.g[j] * k.g[j]);
    out.dc_prev[j] = dc_total * k.f[j];
  }
  out.dx.assign(p.d_in, 0.0);
  out.dh_prev.assign(d_h, 0.0);
  auto gate = [&](Param& w, Param& b, const Vec& da) {
    OuterAddCols(w.grad, 0, da, k.x);
    OuterAddCols(w.grad, p.d_in, da, k.h_prev);
    Axpy(1.0, da, b.grad.flat());
    MatTVecAddCols(w.value, 0, da, out.dx);
    MatTVecAddCols(w.value, p.d_in, da, out.dh_prev);
  };
  gate(p.w_i, p.b_i, da_i);
  gate(p.w_f, p.b_f, da_f);
  gate(p.w_o, p.b_o, da_o);
  gate(p.w_g, p.b_g, da_g);
  return out;
}

LstmRun LstmRunForward(const LstmCellParams& p, const std::vector<Vec>& xs,
                       const std::vector<bool>& mask, bool reversed,
                       Vec recurrent_mask) {
  CheckDim(mask.size(), static_cast<int>(xs.size()), "sequence mask");
  const int steps = static_cast<int>(xs.size());
  LstmRun run;
  run.reversed = reversed;
  run.recurrent_mask =
      recurrent_mask.empty() ? Vec(p.d_h, 1.0) : std::move(recurrent_mask);
  CheckDim(run.recurrent_mask.size(), p.d_h, "recurrent dropout mask");
  run.outputs.resize(steps);
  run.caches.resize(steps);
  Vec h(p.d_h, 0.0), c(p.d_h, 0.0), h_in(p.d_h);
  for (int s = 0; s < steps; ++s) {
    const int t = reversed ? steps - 1 - s : s;
    if (mask[t]) {
      for (int j = 0; j < p.d_h; ++j) h_in[j] = h[j] * run.recurrent_mask[j];
      LstmStep step = LstmCellForward(p, xs[t], h_in, c);
      h = std::move(step.h);
      c = std::move(step.c);
      run.caches[t] = std::move(step.cache);
    }
    run.outputs[t] = h;
  }
  return run;
}

std::vector<Vec> LstmRunBackward(LstmCellParams& p, const LstmRun& run,
                                 const std::vector<bool>& mask,
                                 const std::vector<Vec>& d_outputs) {
  const int steps = static_cast<int>(run.outputs.size());
  CheckDim(d_outputs.size(), steps, "lstm output gradients");
  std::vector<Vec> dxs(steps, Vec(p.d_in, 0.0));
  Vec dh_next(p.d_h, 0.0), dc_next(p.d_h, 0.0), dh_total(p.d_h);
  for (int s = steps - 1; s >= 0; --s) {
    const int t = run.reversed ? steps - 1 - s : s;
    for (int j = 0; j < p.d_h; ++j) dh_total[j] = d_outputs[t][j] + dh_next[j];
    if (!mask[t]) {
      dh_next = dh_total;
      continue;
    }
    LstmGrads g = LstmCellBackward(p, run.caches[t], dh_total, dc_next);
    dxs[t] = std::move(g.dx);
    for (int j = 0; j < p.d_h; ++j) {
      dh_next[j] = g.dh_prev[j] * run.recurrent_mask[j];
    }
    dc_next = std::move(g.dc_prev);
  }
  return dxs;
}

BiLstmTrace BiLstmForward(const LstmCellParams& fwd, const LstmCellParams& bwd,
                          const std::vector<Vec>& xs, const std::vector<bool>& mask,
                          Vec fwd_recurrent_mask, Vec bwd_recurrent_mask) {
  BiLstmTrace trace;
  trace.fwd = LstmRunForward(fwd, xs, mask, false, std::move(fwd_recurrent_mask));
  trace.bwd = LstmRunForward(bwd, xs, mask, true, std::move(bwd_recurrent_mask));
  trace.outputs.resize(xs.size());
  for (std::size_t t = 0; t < xs.size(); ++t) {
    Vec& out = trace.outputs[t];
    out.reserve(fwd.d_h + bwd.d_h);
    out.insert(out.end(), trace.fwd.outputs[t].begin(), trace.fwd.outputs[t].end());
    out.insert(out.end(), trace.bwd.outputs[t].begin(), trace.bwd.outputs[t].end());
  }
  return trace;
}

std::vector<Vec> BiLstmBackward(LstmCellParams& fwd, LstmCellParams& bwd,
                                const BiLstmTrace& trace,
                                const std::vector<bool>& mask,
                                const std::vector<Vec>& d_outputs) {
  const std::size_t steps = d_outputs.size();
  std::vector<Vec> d_fwd(steps), d_bwd(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    CheckDim(d_outputs[t].size(), fwd.d_h + bwd.d_h, "bilstm output gradient");
    d_fwd[t].assign(d_outputs[t].begin(), d_outputs[t].begin() + fwd.d_h);
    d_bwd[t].assign(d_outputs[t].begin() + fwd.d_h, d_outputs[t].end());
  }
  auto dxs = LstmRunBackward(fwd, trace.fwd, mask, d_fwd);
  const auto dxs_b = LstmRunBackward(bwd, trace.bwd, mask, d_bwd);
  for (std::size_t t = 0; t < steps; ++t) Axpy(1.0, dxs_b[t], dxs[t]);
  return dxs;
}

Vec Softmax(std::span<const double> v) {
  return MaskedSoftmax(v, std::vector<bool>(v.size(), true));
}

Vec MaskedSoftmax(std::span<const double> v, const std::vector<bool>& mask) {
  CheckDim(mask.size(), static_cast<int>(v.size()), "softmax mask");
  Vec out(v.size(), 0.0);
  double max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mask[i]) max = std::max(max, v[i]);
  }
  if (!std::isfinite(max)) return out;  // nothing unmasked
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!mask[i]) continue;
    out[i] = std::exp(v[i] - max);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

CrossEntropyResult CrossEntropy(std::span<const double> logits, int gold) {
  if (gold < 0 || gold >= static_cast<int>(logits.size())) {
    throw Error(ErrorCode::kIndexOutOfRange, "gold class out of range");
  }
  double max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - max);
  const double log_z = max + std::log(sum);
  CrossEntropyResult r;
  r.loss = log_z - logits[gold];
  r.dlogits.resize(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) {
    r.dlogits[k] = std::exp(logits[k] - log_z);
  }
  r.dlogits[gold] -= 1.0;
  return r;
}

Vec DropoutMask(std::size_t n, double rate, bool training, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw Error(ErrorCode::kBadRate,
                "dropout rate must be in [0, 1), got " + std::to_string(rate));
  }
  Vec mask(n, 1.0);
  if (!training || rate == 0.0) return mask;
  std::bernoulli_distribution keep(1.0 - rate);
  const double scale = 1.0 / (1.0 - rate);
  for (double& m : mask) m = keep(rng) ? scale : 0.0;
  return mask;
}

Vec Dropout(std::span<const double> v, double rate, bool training, Rng& rng) {
  const Vec mask = DropoutMask(v.size(), rate, training, rng);
  Vec out(v.begin(), v.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return out;
}

void RmspropStep(Param& p, double lr, double rho, double eps) {
  auto value = p.value.flat();
  auto grad = p.grad.flat();
  auto cache = p.rms_cache.flat();
  for (std::size_t k = 0; k < value.size(); ++k) {
    const double g = grad[k];
    constexpr double kMax = std::numeric_limits<double>::max();
    // Saturate instead of overflowing for very large finite gradients.
    const double g2 = std::min(g * g, kMax);
    cache[k] = std::min(rho * cache[k] + (1.0 - rho) * g2, kMax);
    value[k] -= lr * g / std::sqrt(cache[k] + eps);
    grad[k] = 0.0;
  }
}

bool GradCheckReport::passed() const {
  return std::all_of(blocks.begin(), blocks.end(),
                     [](const GradCheckBlock& b) { return b.passed(); });
}

GradCheckReport GradCheck(const std::function<double()>& loss,
                          const std::vector<std::pair<std::string, Param*>>& params,
                          double eps, double tol) {
  GradCheckReport report;
  for (const auto& [name, param] : params) {
    GradCheckBlock block;
    block.name = name;
    auto value = param->value.flat();
    auto grad = param->grad.flat();
    for (std::size_t k = 0; k < value.size(); ++k) {
      const double original = value[k];
      value[k] = original + eps;
      const double plus = loss();
      value[k] = original - eps;
      const double minus = loss();
      value[k] = original;
      const double numeric = (plus - minus) / (2.0 * eps);
      const double analytic = grad[k];
      const double err = std::abs(analytic - numeric) /
                         std::max(1.0, std::abs(analytic) + std::abs(numeric));
      block.max_error = std::max(block.max_error, err);
      if (!(err <= tol)) ++block.failures;
      ++block.entries;
    }
    report.blocks.push_back(std::move(block));
  }
  return report;
}

}  // namespace atp
