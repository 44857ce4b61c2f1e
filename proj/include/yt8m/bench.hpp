#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "yt8m/dataset.hpp"

namespace yt8m {

struct BenchResult {
  std::string task;
  std::size_t rows = 0;
  std::size_t k = 0;
  int threads = 1;
  double wall_seconds = 0.0;
  double rows_per_second = 0.0;
  double bytes_per_second = 0.0;
  std::uintmax_t file_bytes = 0;      // bytes parsed during the timed section
  std::uint64_t peak_rss_bytes = 0;   // process high-water mark, from getrusage
  double gap = 0.0;                   // eval only
};

struct BenchData {
  GroundTruth truth;
  std::vector<std::filesystem::path> files;
};

/// Seeded truth set over `rows` videos (1 to 4 labels out of 4800) and
/// `files` submissions of k pairs per video that recall most true labels.
/// Submissions are streamed to disk under `dir`.
BenchData make_bench_data(std::size_t rows, std::size_t k, std::size_t files, std::uint64_t seed,
                          const std::filesystem::path& dir);

/// Times parse + GAP over a generated submission. Generation is not timed.
/// Errors: Io.
BenchResult bench_eval(std::size_t rows, std::size_t k, std::uint64_t seed,
                       std::optional<std::filesystem::path> dir = std::nullopt);

/// Times average_files over `files` generated submissions.
BenchResult bench_avg_files(std::size_t rows, std::size_t k, std::size_t files,
                            std::uint64_t seed,
                            std::optional<std::filesystem::path> dir = std::nullopt);

std::uint64_t peak_rss_bytes() noexcept;

std::string bench_csv(std::span<const BenchResult> results);

}  // namespace yt8m
