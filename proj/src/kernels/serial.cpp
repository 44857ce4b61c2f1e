#include <algorithm>
#include <string>

#include "row_ops.hpp"
#include "yt8m/error.hpp"
#include "yt8m/kernels.hpp"

namespace yt8m::kernels {

namespace detail {

void check_gemm(bool ok, const char* what, const Tensor2& a, const Tensor2& b, const Tensor2& c) {
  if (ok) return;
  auto dims = [](const Tensor2& t) {
    return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
  };
  fail(ErrorCode::ShapeMismatch,
       std::string(what) + " with a=" + dims(a) + " b=" + dims(b) + " c=" + dims(c));
}

}  // namespace detail

namespace serial {

void gemm_nn(const Tensor2& a, const Tensor2& b, Tensor2& c) {
  detail::check_gemm(a.cols() == b.rows() && c.rows() == a.rows() && c.cols() == b.cols(),
                     "gemm_nn", a, b, c);
  for (std::size_t i = 0; i < c.rows(); ++i) detail::nn_row(a, b, c, i);
}

void gemm_tn(const Tensor2& a, const Tensor2& b, Tensor2& c) {
  detail::check_gemm(a.rows() == b.rows() && c.rows() == a.cols() && c.cols() == b.cols(),
                     "gemm_tn", a, b, c);
  for (std::size_t i = 0; i < c.rows(); ++i) detail::tn_row(a, b, c, i);
}

void gemm_nt(const Tensor2& a, const Tensor2& b, Tensor2& c) {
  detail::check_gemm(a.cols() == b.cols() && c.rows() == a.rows() && c.cols() == b.rows(),
                     "gemm_nt", a, b, c);
  for (std::size_t i = 0; i < c.rows(); ++i) detail::nt_row(a, b, c, i);
}

void sort_pooled(std::span<PooledEntry> entries) {
  std::sort(entries.begin(), entries.end(), pooled_before);
}

}  // namespace serial
}  // namespace yt8m::kernels
