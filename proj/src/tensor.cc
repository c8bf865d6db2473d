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

#include "atp/tensor.h"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace atp {

void Tensor2::Fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor2::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

void InitUniform(Tensor2& t, double scale, Rng& rng) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (double& v : t.flat()) v = dist(rng);
}

double Dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  // Four independent accumulators; the summation order is fixed.
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  const std::size_t n = a.size();
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

void Axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void MatVecAdd(const Tensor2& w, std::span<const double> x, std::span<double> y) {
  MatVecAddCols(w, 0, x, y);
}

void MatVecAddCols(const Tensor2& w, int col_begin, std::span<const double> x,
                   std::span<double> y) {
  assert(static_cast<int>(y.size()) == w.rows());
  assert(col_begin + static_cast<int>(x.size()) <= w.cols());
  for (int r = 0; r < w.rows(); ++r) {
    y[r] += Dot(w.row(r).subspan(col_begin, x.size()), x);
  }
}

void MatTVecAddCols(const Tensor2& w, int col_begin, std::span<const double> dy,
                    std::span<double> dx) {
  assert(static_cast<int>(dy.size()) == w.rows());
  for (int r = 0; r < w.rows(); ++r) {
    if (dy[r] == 0.0) continue;
    Axpy(dy[r], w.row(r).subspan(col_begin, dx.size()), dx);
  }
}

void OuterAddCols(Tensor2& g, int col_begin, std::span<const double> dy,
                  std::span<const double> x) {
  assert(static_cast<int>(dy.size()) == g.rows());
  for (int r = 0; r < g.rows(); ++r) {
    if (dy[r] == 0.0) continue;
    Axpy(dy[r], x, g.row(r).subspan(col_begin, x.size()));
  }
}

}  // namespace atp
