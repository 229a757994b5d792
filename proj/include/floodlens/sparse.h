// Copyright 2026 The FloodLens Authors.
//
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

#ifndef FLOODLENS_SPARSE_H_
#define FLOODLENS_SPARSE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "floodlens/textfeat.h"

namespace floodlens {

// Row-major compressed sparse matrix; the design matrix shared by every
// trainer. Dense rows (embeddings) are stored with all columns present.
class SparseMatrix {
 public:
  explicit SparseMatrix(std::size_t cols = 0) : cols_(cols) {}

  struct RowView {
    std::span<const std::uint32_t> index;
    std::span<const double> value;

    // Value at column |c| (zero when absent).
    double at(std::uint32_t c) const;
  };

  void add_row(const textfeat::FeatureVector &v);
  void add_dense_row(std::span<const float> values);

  std::size_t rows() const { return row_ptr_.size() - 1; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return index_.size(); }

  RowView row(std::size_t r) const {
    std::size_t b = row_ptr_[r], e = row_ptr_[r + 1];
    return {std::span<const std::uint32_t>(index_).subspan(b, e - b),
            std::span<const double>(value_).subspan(b, e - b)};
  }

  double dot(std::size_t r, std::span<const double> w) const {
    double s = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      s += value_[k] * w[index_[k]];
    }
    return s;
  }

 private:
  std::size_t cols_;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> index_;
  std::vector<double> value_;
};

}  // namespace floodlens

#endif  // FLOODLENS_SPARSE_H_
