// ramdec/matrix.h

// Copyright 2026  The ramdec Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef RAMDEC_MATRIX_H_
#define RAMDEC_MATRIX_H_

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace ramdec {

/// Dense row-major matrix.  Deliberately minimal: storage plus row views.
template <typename Real>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, Real fill = Real(0))
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * cols, fill) {}

  int NumRows() const { return rows_; }
  int NumCols() const { return cols_; }
  bool Empty() const { return data_.empty(); }

  Real &operator()(int r, int c) {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }
  Real operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }

  std::span<Real> Row(int r) {
    return {data_.data() + static_cast<std::size_t>(r) * cols_,
            static_cast<std::size_t>(cols_)};
  }
  std::span<const Real> Row(int r) const {
    return {data_.data() + static_cast<std::size_t>(r) * cols_,
            static_cast<std::size_t>(cols_)};
  }

  std::vector<Real> &Data() { return data_; }
  const std::vector<Real> &Data() const { return data_; }

  /// Copies rows [begin, begin + count).
  Matrix RowRange(int begin, int count) const {
    Matrix out(count, cols_);
    std::copy(data_.begin() + static_cast<std::size_t>(begin) * cols_,
              data_.begin() + static_cast<std::size_t>(begin + count) * cols_,
              out.data_.begin());
    return out;
  }

  bool operator==(const Matrix &other) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Real> data_;
};

}  // namespace ramdec

#endif  // RAMDEC_MATRIX_H_
