#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace yt8m {

/// Appends length- and CRC-framed records:
///   u64 LE length | u32 LE masked crc32c(length bytes) | payload | u32 LE masked crc32c(payload)
class TfRecordWriter {
 public:
  explicit TfRecordWriter(const std::filesystem::path& path);

  void write(std::string_view payload);
  /// Flushes and reports stream failures as Error(Io).
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Single-consumer record stream. Both checksums are verified before a
/// payload is returned; errors carry the byte offset of the failing record.
class TfRecordReader {
 public:
  explicit TfRecordReader(const std::filesystem::path& path);

  /// Next payload, or nullopt at a clean end of file.
  std::optional<std::string> next();
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::uint64_t file_size_ = 0;
  std::uint64_t offset_ = 0;
};

void write_tfrecord_file(const std::filesystem::path& path,
                         const std::vector<std::string>& payloads);
std::vector<std::string> read_tfrecord_file(const std::filesystem::path& path);

/// The framing of one record as bytes, for tests and in-memory use.
std::string frame_record(std::string_view payload);

}  // namespace yt8m
