#include "biphoton/matrix.hpp"

#include "biphoton/parallel.hpp"

namespace biphoton {

namespace {
using cplx = std::complex<double>;
}

CMatrix matmul(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matmul: inner dimensions differ");
  CMatrix out(a.rows(), b.cols());
  const std::size_t n = b.cols();
  parallel_for(a.rows(), [&](std::size_t r0, std::size_t r1) {
    for (std::size_t r = r0; r < r1; ++r) {
      cplx* orow = out.row(r);
      const cplx* arow = a.row(r);
      for (std::size_t k = 0; k < a.cols(); ++k) {
        const cplx av = arow[k];
        if (av == cplx(0.0, 0.0)) continue;
        const cplx* brow = b.row(k);
        for (std::size_t c = 0; c < n; ++c) orow[c] += av * brow[c];
      }
    }
  });
  return out;
}

CMatrix matmul_bt(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.cols()) throw DimensionMismatch("matmul_bt: trailing dimensions differ");
  CMatrix out(a.rows(), b.rows());
  parallel_for(a.rows(), [&](std::size_t r0, std::size_t r1) {
    for (std::size_t r = r0; r < r1; ++r) {
      const cplx* arow = a.row(r);
      cplx* orow = out.row(r);
      for (std::size_t c = 0; c < b.rows(); ++c) {
        const cplx* brow = b.row(c);
        cplx s(0.0, 0.0);
        for (std::size_t k = 0; k < a.cols(); ++k) s += arow[k] * brow[k];
        orow[c] = s;
      }
    }
  });
  return out;
}

} // namespace biphoton
