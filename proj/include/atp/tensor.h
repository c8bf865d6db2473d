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

#ifndef ATP_TENSOR_H_
#define ATP_TENSOR_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace atp {

using Vec = std::vector<double>;
using Rng = std::mt19937_64;

// Dense row-major matrix of doubles.
class Tensor2 {
 public:
  Tensor2() = default;
  Tensor2(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int r, int c) { return data_[r * cols_ + c]; }
  double operator()(int r, int c) const { return data_[r * cols_ + c]; }

  std::span<double> row(int r) {
    return {data_.data() + static_cast<std::size_t>(r) * cols_,
            static_cast<std::size_t>(cols_)};
  }
  std::span<const double> row(int r) const {
    return {data_.data() + static_cast<std::size_t>(r) * cols_,
            static_cast<std::size_t>(cols_)};
  }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  void Fill(double v);
  bool SameShape(const Tensor2& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool AllFinite() const;

  friend bool operator==(const Tensor2&, const Tensor2&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// A trainable tensor with its gradient and RMSprop accumulator.
struct Param {
  Param() = default;
  Param(int rows, int cols) : value(rows, cols), grad(rows, cols), rms_cache(rows, cols) {}

  Tensor2 value;
  Tensor2 grad;
  Tensor2 rms_cache;

  void ZeroGrad() { grad.Fill(0.0); }
};

void InitUniform(Tensor2& t, double scale, Rng& rng);

// y += W x
void MatVecAdd(const Tensor2& w, std::span<const double> x, std::span<double> y);
// y += W[:, col_begin : col_begin + x.size()] x
void MatVecAddCols(const Tensor2& w, int col_begin, std::span<const double> x,
                   std::span<double> y);
// dx += W[:, col_begin : col_begin + dx.size()]^T dy
void MatTVecAddCols(const Tensor2& w, int col_begin, std::span<const double> dy,
                    std::span<double> dx);
// G[:, col_begin : col_begin + x.size()] += dy x^T
void OuterAddCols(Tensor2& g, int col_begin, std::span<const double> dy,
                  std::span<const double> x);

double Dot(std::span<const double> a, std::span<const double> b);
// y += a * x
void Axpy(double a, std::span<const double> x, std::span<double> y);

}  // namespace atp

#endif  // ATP_TENSOR_H_
