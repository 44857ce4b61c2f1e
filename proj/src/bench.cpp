#include "yt8m/bench.hpp"

#include <sys/resource.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "yt8m/ensemble.hpp"
#include "yt8m/error.hpp"
#include "yt8m/kernels.hpp"
#include "yt8m/metrics.hpp"
#include "yt8m/rng.hpp"
#include "yt8m/submission.hpp"
#include "yt8m/training.hpp"

namespace yt8m {

namespace {

constexpr std::size_t kBenchClasses = 4800;

std::string bench_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "b%08zu", i);
  return buf;
}

// A scratch directory removed on scope exit unless the caller supplied one.
class ScratchDir {
 public:
  ScratchDir(std::optional<std::filesystem::path> dir, std::uint64_t seed) {
    if (dir) {
      path_ = *dir;
      owned_ = false;
    } else {
      path_ = std::filesystem::temp_directory_path() /
              ("yt8m-bench-" + std::to_string(::getpid()) + "-" + std::to_string(seed));
    }
    std::error_code ec;
    std::filesystem::create_directories(path_, ec);
    if (ec) fail(ErrorCode::Io, "cannot create " + path_.string() + ": " + ec.message());
  }
  ~ScratchDir() {
    if (owned_) {
      std::error_code ec;
      std::filesystem::remove_all(path_, ec);
    }
  }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  bool owned_ = true;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void fill_rates(BenchResult& r) {
  if (r.wall_seconds > 0.0) {
    r.rows_per_second = static_cast<double>(r.rows) / r.wall_seconds;
    r.bytes_per_second = static_cast<double>(r.file_bytes) / r.wall_seconds;
  }
  r.threads = kernels::num_threads();
  r.peak_rss_bytes = peak_rss_bytes();
}

}  // namespace

std::uint64_t peak_rss_bytes() noexcept {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return 0;
  return static_cast<std::uint64_t>(usage.ru_maxrss) * 1024;  // kilobytes on Linux
}

BenchData make_bench_data(std::size_t rows, std::size_t k, std::size_t files, std::uint64_t seed,
                          const std::filesystem::path& dir) {
  BenchData data;
  data.truth.reserve(rows);
  Rng truth_rng(derive_seed(seed, hash_name("truth")));
  std::vector<std::vector<ClassIndex>> labels(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t n = 1 + truth_rng.below(4);
    auto& row = labels[i];
    while (row.size() < n) {
      const auto c = static_cast<ClassIndex>(truth_rng.below(kBenchClasses));
      if (std::find(row.begin(), row.end(), c) == row.end()) row.push_back(c);
    }
    std::sort(row.begin(), row.end());
  }

  std::vector<LabelConfidence> pairs;
  for (std::size_t f = 0; f < files; ++f) {
    Rng rng(derive_seed(seed, hash_name("submission") + f));
    const auto path = dir / ("bench-" + std::to_string(f) + ".csv");
    SubmissionWriter writer(path);
    for (std::size_t i = 0; i < rows; ++i) {
      pairs.clear();
      for (ClassIndex c : labels[i]) {
        if (pairs.size() < k && rng.bernoulli(0.8)) pairs.push_back({c, rng.uniform(0.3, 1.0)});
      }
      while (pairs.size() < k) {
        const auto c = static_cast<ClassIndex>(rng.below(kBenchClasses));
        const bool taken = std::any_of(pairs.begin(), pairs.end(),
                                       [c](const LabelConfidence& p) { return p.label == c; });
        if (!taken) pairs.push_back({c, rng.uniform(0.0, 0.6)});
      }
      writer.write(PredictionList(bench_id(i), pairs));
    }
    writer.close();
    data.files.push_back(path);
  }
  for (std::size_t i = 0; i < rows; ++i) data.truth.emplace(bench_id(i), std::move(labels[i]));
  return data;
}

BenchResult bench_eval(std::size_t rows, std::size_t k, std::uint64_t seed,
                       std::optional<std::filesystem::path> dir) {
  ScratchDir scratch(std::move(dir), seed);
  const BenchData data = make_bench_data(rows, k, 1, seed, scratch.path());

  BenchResult r;
  r.task = "eval";
  r.rows = rows;
  r.k = k;
  r.file_bytes = std::filesystem::file_size(data.files[0]);
  const auto t0 = std::chrono::steady_clock::now();
  GapAccumulator acc(data.truth, k);
  SubmissionReader reader(data.files[0]);
  while (auto list = reader.next()) acc.add(*list);
  r.gap = acc.finish().gap;
  r.wall_seconds = seconds_since(t0);
  fill_rates(r);
  return r;
}

BenchResult bench_avg_files(std::size_t rows, std::size_t k, std::size_t files,
                            std::uint64_t seed, std::optional<std::filesystem::path> dir) {
  ScratchDir scratch(std::move(dir), seed);
  const BenchData data = make_bench_data(rows, k, files, seed, scratch.path());

  BenchResult r;
  r.task = "avg-files";
  r.rows = rows;
  r.k = k;
  for (const auto& f : data.files) r.file_bytes += std::filesystem::file_size(f);
  const auto t0 = std::chrono::steady_clock::now();
  average_files(data.files, k, scratch.path() / "average.csv");
  r.wall_seconds = seconds_since(t0);
  fill_rates(r);
  return r;
}

std::string bench_csv(std::span<const BenchResult> results) {
  std::string out =
      "task,rows,k,threads,wall_seconds,rows_per_second,bytes_per_second,file_bytes,"
      "peak_rss_bytes,gap\n";
  for (const auto& r : results) {
    out += r.task + ',' + std::to_string(r.rows) + ',' + std::to_string(r.k) + ',' +
           std::to_string(r.threads) + ',' + format_real(r.wall_seconds) + ',' +
           format_real(r.rows_per_second) + ',' + format_real(r.bytes_per_second) + ',' +
           std::to_string(r.file_bytes) + ',' + std::to_string(r.peak_rss_bytes) + ',' +
           format_real(r.gap) + '\n';
  }
  return out;
}

}  // namespace yt8m
