#pragma once

// Per-output-row bodies shared by the serial and OpenMP kernels. Both
// variants call these with the same arguments; only the row loop differs.

#include <cstddef>

#include "yt8m/tensor.hpp"

namespace yt8m::kernels::detail {

inline void nn_row(const Tensor2& a, const Tensor2& b, Tensor2& c, std::size_t i) {
  const std::size_t inner = a.cols();
  const std::size_t n = b.cols();
  const double* arow = a.data() + i * inner;
  double* crow = c.data() + i * n;
  for (std::size_t p = 0; p < inner; ++p) {
    const double ap = arow[p];
    const double* brow = b.data() + p * n;
    for (std::size_t j = 0; j < n; ++j) crow[j] += ap * brow[j];
  }
}

inline void tn_row(const Tensor2& a, const Tensor2& b, Tensor2& c, std::size_t i) {
  const std::size_t batch = a.rows();
  const std::size_t m = a.cols();
  const std::size_t n = b.cols();
  double* crow = c.data() + i * n;
  for (std::size_t r = 0; r < batch; ++r) {
    const double ai = a.data()[r * m + i];
    const double* brow = b.data() + r * n;
    for (std::size_t j = 0; j < n; ++j) crow[j] += ai * brow[j];
  }
}

inline double dot(const double* x, const double* y, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t p = 0;
  for (; p + 4 <= n; p += 4) {
    s0 += x[p] * y[p];
    s1 += x[p + 1] * y[p + 1];
    s2 += x[p + 2] * y[p + 2];
    s3 += x[p + 3] * y[p + 3];
  }
  for (; p < n; ++p) s0 += x[p] * y[p];
  return (s0 + s1) + (s2 + s3);
}

inline void nt_row(const Tensor2& a, const Tensor2& b, Tensor2& c, std::size_t i) {
  const std::size_t inner = a.cols();
  const double* arow = a.data() + i * inner;
  double* crow = c.data() + i * c.cols();
  for (std::size_t j = 0; j < b.rows(); ++j) crow[j] += dot(arow, b.data() + j * inner, inner);
}

}  // namespace yt8m::kernels::detail
