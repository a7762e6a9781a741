// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/matrix.hpp"

#include <string>

#include "simulst/error.hpp"

namespace simulst {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("matrix data has " + std::to_string(data_.size()) +
                         " elements, expected " + std::to_string(rows * cols));
  }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw DimensionError("ragged rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Matrix(rows.size(), cols, std::move(data));
}

Matrix Matrix::slice_rows(std::size_t first, std::size_t count) const {
  if (first + count > rows_) throw DimensionError("row slice out of range");
  std::vector<double> data(data_.begin() + static_cast<std::ptrdiff_t>(first * cols_),
                           data_.begin() + static_cast<std::ptrdiff_t>((first + count) * cols_));
  return Matrix(count, cols_, std::move(data));
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " by " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double aip = a(i, p);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aip * b(p, j);
    }
  }
  return c;
}

}  // namespace simulst
