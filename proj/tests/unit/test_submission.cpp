#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "yt8m/error.hpp"
#include "yt8m/rng.hpp"
#include "yt8m/submission.hpp"

using namespace yt8m;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "yt8m-test-submission";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << bytes;
}

Error parse_error(const std::string& content, std::optional<std::size_t> classes = std::nullopt) {
  const auto p = temp_path("bad.csv");
  spit(p, content);
  try {
    parse_submission(p, classes);
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "parsed without error: " << content;
  return Error(ErrorCode::Io, "");
}

const std::string kHeader = "VideoId,LabelConfidencePairs\n";

}  // namespace

TEST(Format, FigureOneRow) {
  const PredictionList p("100000001", {{1, 0.5}, {2, 0.3}, {3, 0.1}, {4, 0.05}, {5, 0.05}});
  EXPECT_EQ(format_row(p, ConfidenceFormat::round_trip), "100000001,1 0.5 2 0.3 3 0.1 4 0.05 5 0.05");
  const auto path = temp_path("fig1.csv");
  EXPECT_EQ(write_submission(std::vector{p}, path), 1u);
  EXPECT_EQ(slurp(path), kHeader + "100000001,1 0.5 2 0.3 3 0.1 4 0.05 5 0.05\n");
  const auto back = parse_submission(path);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].size(), 5u);
  EXPECT_EQ(back[0], p);
}

TEST(Format, Confidences) {
  EXPECT_EQ(format_confidence(0.1, ConfidenceFormat::round_trip), "0.1");
  EXPECT_EQ(format_confidence(1.0, ConfidenceFormat::round_trip), "1");
  EXPECT_EQ(format_confidence(0.0, ConfidenceFormat::round_trip), "0");
  EXPECT_EQ(format_confidence(0.123456789, ConfidenceFormat::round_trip), "0.123456789");
  EXPECT_EQ(format_confidence(0.123456789, ConfidenceFormat::six_digits), "0.123457");
  EXPECT_EQ(format_confidence(0.5, ConfidenceFormat::six_digits), "0.5");
  EXPECT_EQ(format_confidence(1.0, ConfidenceFormat::six_digits), "1");
  EXPECT_EQ(format_confidence(1e-9, ConfidenceFormat::six_digits), "0");
  EXPECT_EQ(format_confidence(0.9999999, ConfidenceFormat::six_digits), "1");
}

TEST(Write, EmptyStreamIsHeaderOnly) {
  const auto path = temp_path("empty.csv");
  EXPECT_EQ(write_submission({}, path), 0u);
  EXPECT_EQ(slurp(path), kHeader);
  EXPECT_TRUE(parse_submission(path).empty());
}

TEST(Write, DuplicateVideoRejected) {
  const std::vector<PredictionList> lists{PredictionList("a", {{1, 0.5}}), PredictionList("a", {{2, 0.5}})};
  try {
    write_submission(lists, temp_path("dup.csv"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateVideo);
    EXPECT_EQ(e.detail(), "a");
  }
}

TEST(Write, UnwritablePathIsIo) {
  try {
    write_submission({}, "/nonexistent-dir/x.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.is_io());
  }
}

TEST(RoundTrip, RandomListsAndFixpoint) {
  Rng rng(99);
  std::vector<PredictionList> lists;
  for (std::size_t i = 0; i < 1000; ++i) {
    std::vector<LabelConfidence> pairs;
    const std::size_t n = rng.below(21);
    while (pairs.size() < n) {
      const auto label = static_cast<ClassIndex>(rng.below(4800));
      if (std::none_of(pairs.begin(), pairs.end(), [&](auto& p) { return p.label == label; })) {
        pairs.push_back({label, rng.uniform()});
      }
    }
    lists.emplace_back("id" + std::to_string(i), pairs);
  }
  const auto a = temp_path("rt-a.csv"), b = temp_path("rt-b.csv");
  write_submission(lists, a);
  const auto parsed = parse_submission(a, 4800);
  EXPECT_EQ(parsed, lists);
  write_submission(parsed, b);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST(RoundTrip, RoundedOutputIsAFixpointAfterOnePass) {
  const std::vector<PredictionList> lists{PredictionList("x", {{3, 0.123456789}, {7, 1.0 / 3}})};
  const auto a = temp_path("six-a.csv"), b = temp_path("six-b.csv");
  write_submission(lists, a, ConfidenceFormat::six_digits);
  EXPECT_EQ(slurp(a), kHeader + "x,7 0.333333 3 0.123457\n");
  write_submission(parse_submission(a), b, ConfidenceFormat::six_digits);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST(Parse, CrlfAccepted) {
  const auto p = temp_path("crlf.csv");
  spit(p, "VideoId,LabelConfidencePairs\r\nv1,4 0.25 2 0.75\r\nv2,\r\n");
  const auto lists = parse_submission(p);
  ASSERT_EQ(lists.size(), 2u);
  EXPECT_EQ(lists[0].pairs(), (std::vector<LabelConfidence>{{2, 0.75}, {4, 0.25}}));
  EXPECT_EQ(lists[1].size(), 0u);
}

TEST(Parse, ClampsAndAcceptsExponents) {
  const auto p = temp_path("clamp.csv");
  spit(p, kHeader + "v,1 1.5 2 -0.5 3 5E-4\n");
  const auto lists = parse_submission(p);
  EXPECT_EQ(lists[0].pairs(), (std::vector<LabelConfidence>{{1, 1.0}, {3, 5e-4}, {2, 0.0}}));
}

TEST(Parse, FileWithoutTrailingNewline) {
  const auto p = temp_path("nonl.csv");
  spit(p, kHeader + "v,1 0.5");
  EXPECT_EQ(parse_submission(p).size(), 1u);
}

TEST(Parse, StrictHeader) {
  const Error e = parse_error("VideoID,LabelConfidencePairs\nv,1 0.5\n");
  EXPECT_EQ(e.code(), ErrorCode::BadHeader);
  EXPECT_EQ(e.detail(), "VideoID,LabelConfidencePairs");
  EXPECT_EQ(parse_error("").code(), ErrorCode::BadHeader);
  EXPECT_EQ(parse_error(" VideoId,LabelConfidencePairs\n").code(), ErrorCode::BadHeader);
}

TEST(Parse, MalformedRows) {
  Error e = parse_error(kHeader + "abc,1 0.5 2\n");
  EXPECT_EQ(e.code(), ErrorCode::OddTokenCount);
  EXPECT_EQ(e.detail(), "line 2");

  e = parse_error(kHeader + "ok,1 0.5\nabc,x 0.5\n");
  EXPECT_EQ(e.code(), ErrorCode::BadNumber);
  EXPECT_NE(e.detail().find("line 3"), std::string::npos);
  EXPECT_NE(e.detail().find("'x'"), std::string::npos);

  EXPECT_EQ(parse_error(kHeader + "abc,1 zero\n").code(), ErrorCode::BadNumber);
  EXPECT_EQ(parse_error(kHeader + "abc,1.5 0.2\n").code(), ErrorCode::BadNumber);
  EXPECT_EQ(parse_error(kHeader + "abc,-1 0.2\n").code(), ErrorCode::BadNumber);
  EXPECT_EQ(parse_error(kHeader + "abc,1 nan\n").code(), ErrorCode::BadNumber);
  EXPECT_EQ(parse_error(kHeader + "abc,1 0.2x\n").code(), ErrorCode::BadNumber);

  e = parse_error(kHeader + "abc,1 0.5 1 0.4\n");
  EXPECT_EQ(e.code(), ErrorCode::DuplicateLabel);
  EXPECT_EQ(e.detail(), "line 2");

  e = parse_error(kHeader + "abc,1 0.5\nabc,2 0.4\n");
  EXPECT_EQ(e.code(), ErrorCode::DuplicateVideo);
  EXPECT_EQ(e.detail(), "abc");

  EXPECT_EQ(parse_error(kHeader + "no comma here\n").code(), ErrorCode::MalformedRow);
  EXPECT_EQ(parse_error(kHeader + "\n").code(), ErrorCode::MalformedRow);
  EXPECT_EQ(parse_error(kHeader + ",1 0.5\n").code(), ErrorCode::EmptyVideoId);
  EXPECT_EQ(parse_error(kHeader + "a,7 0.5\n", 5).code(), ErrorCode::LabelOutOfRange);
}

TEST(Parse, MissingFileIsIo) {
  try {
    parse_submission("/nonexistent/file.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.is_io());
  }
}

TEST(Parse, StreamsRowByRow) {
  const auto p = temp_path("stream.csv");
  spit(p, kHeader + "a,1 0.5\nb,2 0.5\nbad row\n");
  SubmissionReader reader(p);
  EXPECT_EQ(reader.next()->video_id(), "a");
  EXPECT_EQ(reader.next()->video_id(), "b");
  EXPECT_THROW(reader.next(), Error);
}
