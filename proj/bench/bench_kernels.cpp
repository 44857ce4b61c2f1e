#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "yt8m/kernels.hpp"
#include "yt8m/rng.hpp"
#include "yt8m/tensor.hpp"

namespace {

using namespace yt8m;

Tensor2 random_tensor(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Tensor2 t(rows, cols);
  Rng rng(seed);
  for (auto& v : t.values()) v = rng.uniform(-1.0, 1.0);
  return t;
}

std::vector<PooledEntry> random_entries(std::size_t n, std::uint64_t seed) {
  std::vector<PooledEntry> out(n);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = {rng.uniform(), static_cast<std::uint32_t>(i / 20), static_cast<std::uint32_t>(rng.below(4800)),
              rng.bernoulli(0.1)};
  }
  return out;
}

template <void (*Gemm)(const Tensor2&, const Tensor2&, Tensor2&)>
void BM_gemm_nn(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor2 a = random_tensor(128, n, 1), b = random_tensor(n, n, 2);
  for (auto _ : state) {
    Tensor2 c(128, n);
    Gemm(a, b, c);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * 128 * static_cast<std::int64_t>(n * n));
}

template <void (*Gemm)(const Tensor2&, const Tensor2&, Tensor2&)>
void BM_gemm_tn(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor2 a = random_tensor(128, n, 1), b = random_tensor(128, n, 2);
  for (auto _ : state) {
    Tensor2 c(n, n);
    Gemm(a, b, c);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * 128 * static_cast<std::int64_t>(n * n));
}

template <void (*Sort)(std::span<PooledEntry>)>
void BM_sort_pooled(benchmark::State& state) {
  const auto base = random_entries(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) {
    state.PauseTiming();
    auto entries = base;
    state.ResumeTiming();
    Sort(entries);
    benchmark::DoNotOptimize(entries.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_gemm_nn<kernels::serial::gemm_nn>)->Name("gemm_nn/serial")->Arg(256)->Arg(1152);
BENCHMARK(BM_gemm_nn<kernels::omp::gemm_nn>)->Name("gemm_nn/omp")->Arg(256)->Arg(1152);
BENCHMARK(BM_gemm_tn<kernels::serial::gemm_tn>)->Name("gemm_tn/serial")->Arg(256)->Arg(1152);
BENCHMARK(BM_gemm_tn<kernels::omp::gemm_tn>)->Name("gemm_tn/omp")->Arg(256)->Arg(1152);
BENCHMARK(BM_sort_pooled<kernels::serial::sort_pooled>)->Name("sort_pooled/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_sort_pooled<kernels::omp::sort_pooled>)->Name("sort_pooled/omp")->Arg(1 << 16)->Arg(1 << 20);

}  // namespace

BENCHMARK_MAIN();
