#pragma once

#include <cstdint>
#include <span>

#include "yt8m/tensor.hpp"

namespace yt8m {

/// One (video, label, confidence) triple of a pooled prediction list.
/// video is the rank of the video id in ascending id order, so comparing
/// ranks is comparing ids.
struct PooledEntry {
  double confidence;
  std::uint32_t video;
  std::uint32_t label;
  bool correct;
};

/// Pooled order: confidence descending, then video ascending, then label
/// ascending. A strict total order whenever (video, label) pairs are unique.
inline bool pooled_before(const PooledEntry& a, const PooledEntry& b) noexcept {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.video != b.video) return a.video < b.video;
  return a.label < b.label;
}

namespace kernels {

// All GEMMs accumulate: c += op(a) * op(b). Callers size and zero c.
// The serial and omp variants perform the same per-element summation in the
// same order, so their results are bit-identical.

namespace serial {
void gemm_nn(const Tensor2& a, const Tensor2& b, Tensor2& c);  // c += a * b
void gemm_tn(const Tensor2& a, const Tensor2& b, Tensor2& c);  // c += a^T * b
void gemm_nt(const Tensor2& a, const Tensor2& b, Tensor2& c);  // c += a * b^T
void sort_pooled(std::span<PooledEntry> entries);
}  // namespace serial

namespace omp {
void gemm_nn(const Tensor2& a, const Tensor2& b, Tensor2& c);
void gemm_tn(const Tensor2& a, const Tensor2& b, Tensor2& c);
void gemm_nt(const Tensor2& a, const Tensor2& b, Tensor2& c);
void sort_pooled(std::span<PooledEntry> entries);
}  // namespace omp

// Dispatching entry points used by the rest of the library: the omp variant
// when built with OpenMP, the serial one otherwise.
void gemm_nn(const Tensor2& a, const Tensor2& b, Tensor2& c);
void gemm_tn(const Tensor2& a, const Tensor2& b, Tensor2& c);
void gemm_nt(const Tensor2& a, const Tensor2& b, Tensor2& c);
void sort_pooled(std::span<PooledEntry> entries);

bool have_openmp() noexcept;
/// Bound the worker pool; n <= 0 keeps the runtime default.
void set_num_threads(int n) noexcept;
int num_threads() noexcept;

}  // namespace kernels
}  // namespace yt8m
