#include <gtest/gtest.h>

#include <filesystem>

#include "yt8m/bench.hpp"
#include "yt8m/submission.hpp"

using namespace yt8m;

TEST(Bench, SmallEvalReportsThroughput) {
  const BenchResult r = bench_eval(1000, 20, 1);
  EXPECT_EQ(r.task, "eval");
  EXPECT_EQ(r.rows, 1000u);
  EXPECT_GT(r.wall_seconds, 0.0);
  EXPECT_GT(r.rows_per_second, 0.0);
  EXPECT_GT(r.bytes_per_second, 0.0);
  EXPECT_GT(r.file_bytes, 1000u * 20 * 4);
  EXPECT_GT(r.peak_rss_bytes, 0u);
  EXPECT_GE(r.threads, 1);
  EXPECT_GT(r.gap, 0.3);
  EXPECT_LT(r.gap, 1.0);
}

TEST(Bench, SeededDataIsReproducible) {
  EXPECT_EQ(bench_eval(500, 10, 4).gap, bench_eval(500, 10, 4).gap);
  EXPECT_NE(bench_eval(500, 10, 4).gap, bench_eval(500, 10, 5).gap);
}

TEST(Bench, GeneratedFilesParse) {
  const auto dir = std::filesystem::temp_directory_path() / "yt8m-test-bench";
  std::filesystem::create_directories(dir);
  const BenchData data = make_bench_data(200, 5, 2, 3, dir);
  ASSERT_EQ(data.files.size(), 2u);
  EXPECT_EQ(data.truth.size(), 200u);
  for (const auto& f : data.files) {
    const auto lists = parse_submission(f, 4800);
    ASSERT_EQ(lists.size(), 200u);
    for (const auto& l : lists) EXPECT_EQ(l.size(), 5u);
  }
}

TEST(Bench, AvgFilesAndCsv) {
  const BenchResult r = bench_avg_files(300, 20, 3, 2);
  EXPECT_EQ(r.task, "avg-files");
  EXPECT_GT(r.rows_per_second, 0.0);
  const std::vector<BenchResult> all{r};
  const std::string csv = bench_csv(all);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "task,rows,k,threads,wall_seconds,rows_per_second,bytes_per_second,file_bytes,"
            "peak_rss_bytes,gap");
  EXPECT_EQ(csv.substr(csv.find('\n') + 1, 14), "avg-files,300,");
}

TEST(Bench, DoublingRowsScalesNearLinearly) {
  const BenchResult small = bench_eval(100000, 20, 3);
  const BenchResult large = bench_eval(200000, 20, 3);
  EXPECT_LE(large.wall_seconds, 2.5 * small.wall_seconds)
      << small.wall_seconds << " s vs " << large.wall_seconds << " s";
}
