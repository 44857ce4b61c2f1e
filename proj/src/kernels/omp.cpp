#include <cstddef>

#include "row_ops.hpp"
#include "yt8m/kernels.hpp"

#ifdef YT8M_HAVE_OPENMP
#include <omp.h>

#include <parallel/algorithm>
#endif

namespace yt8m::kernels {

namespace detail {
void check_gemm(bool ok, const char* what, const Tensor2& a, const Tensor2& b, const Tensor2& c);
}

namespace {
// Below this many multiply-adds the fork/join costs more than it saves.
constexpr std::size_t kParallelWork = 1 << 15;
}  // namespace

namespace omp {

void gemm_nn(const Tensor2& a, const Tensor2& b, Tensor2& c) {
  detail::check_gemm(a.cols() == b.rows() && c.rows() == a.rows() && c.cols() == b.cols(),
                     "gemm_nn", a, b, c);
  const auto rows = static_cast<std::ptrdiff_t>(c.rows());
  [[maybe_unused]] const bool big = a.size() * b.cols() >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t i = 0; i < rows; ++i) detail::nn_row(a, b, c, static_cast<std::size_t>(i));
}

void gemm_tn(const Tensor2& a, const Tensor2& b, Tensor2& c) {
  detail::check_gemm(a.rows() == b.rows() && c.rows() == a.cols() && c.cols() == b.cols(),
                     "gemm_tn", a, b, c);
  const auto rows = static_cast<std::ptrdiff_t>(c.rows());
  [[maybe_unused]] const bool big = a.size() * b.cols() >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t i = 0; i < rows; ++i) detail::tn_row(a, b, c, static_cast<std::size_t>(i));
}

void gemm_nt(const Tensor2& a, const Tensor2& b, Tensor2& c) {
  detail::check_gemm(a.cols() == b.cols() && c.rows() == a.rows() && c.cols() == b.rows(),
                     "gemm_nt", a, b, c);
  const auto rows = static_cast<std::ptrdiff_t>(c.rows());
  [[maybe_unused]] const bool big = a.size() * b.rows() >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t i = 0; i < rows; ++i) detail::nt_row(a, b, c, static_cast<std::size_t>(i));
}

void sort_pooled(std::span<PooledEntry> entries) {
#ifdef YT8M_HAVE_OPENMP
  __gnu_parallel::sort(entries.begin(), entries.end(), pooled_before);
#else
  serial::sort_pooled(entries);
#endif
}

}  // namespace omp

#ifdef YT8M_HAVE_OPENMP
void gemm_nn(const Tensor2& a, const Tensor2& b, Tensor2& c) { omp::gemm_nn(a, b, c); }
void gemm_tn(const Tensor2& a, const Tensor2& b, Tensor2& c) { omp::gemm_tn(a, b, c); }
void gemm_nt(const Tensor2& a, const Tensor2& b, Tensor2& c) { omp::gemm_nt(a, b, c); }
void sort_pooled(std::span<PooledEntry> entries) { omp::sort_pooled(entries); }
bool have_openmp() noexcept { return true; }
void set_num_threads(int n) noexcept {
  if (n > 0) omp_set_num_threads(n);
}
int num_threads() noexcept { return omp_get_max_threads(); }
#else
void gemm_nn(const Tensor2& a, const Tensor2& b, Tensor2& c) { serial::gemm_nn(a, b, c); }
void gemm_tn(const Tensor2& a, const Tensor2& b, Tensor2& c) { serial::gemm_tn(a, b, c); }
void gemm_nt(const Tensor2& a, const Tensor2& b, Tensor2& c) { serial::gemm_nt(a, b, c); }
void sort_pooled(std::span<PooledEntry> entries) { serial::sort_pooled(entries); }
bool have_openmp() noexcept { return false; }
void set_num_threads(int) noexcept {}
int num_threads() noexcept { return 1; }
#endif

}  // namespace yt8m::kernels
