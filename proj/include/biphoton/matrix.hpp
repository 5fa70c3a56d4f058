#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "biphoton/errors.hpp"

namespace biphoton {

/// Dense row-major complex matrix.  Products parallelize over output rows
/// with a fixed inner summation order, so results do not depend on the
/// thread count.
class CMatrix {
public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, std::complex<double>(0.0, 0.0)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::complex<double>& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const std::complex<double>& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::complex<double>* row(std::size_t r) { return data_.data() + r * cols_; }
  const std::complex<double>* row(std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<std::complex<double>>& data() { return data_; }
  const std::vector<std::complex<double>>& data() const { return data_; }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::complex<double>> data_;
};

/// a * b
CMatrix matmul(const CMatrix& a, const CMatrix& b);

/// a * b^T (contraction over the trailing index of both).
CMatrix matmul_bt(const CMatrix& a, const CMatrix& b);

} // namespace biphoton
