#include "yt8m/tfrecord.hpp"

#include "le_bytes.hpp"
#include "yt8m/crc32c.hpp"
#include "yt8m/error.hpp"

namespace yt8m {

namespace {
constexpr std::size_t kHeaderSize = sizeof(std::uint64_t) + sizeof(std::uint32_t);
constexpr std::size_t kFooterSize = sizeof(std::uint32_t);
}  // namespace

std::string frame_record(std::string_view payload) {
  std::string out;
  out.reserve(kHeaderSize + payload.size() + kFooterSize);
  le::put_u64(out, payload.size());
  le::put_u32(out, crc32c::mask(crc32c::value(std::string_view(out.data(), 8))));
  out.append(payload);
  le::put_u32(out, crc32c::mask(crc32c::value(payload)));
  return out;
}

TfRecordWriter::TfRecordWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
}

void TfRecordWriter::write(std::string_view payload) {
  const std::string framed = frame_record(payload);
  out_.write(framed.data(), static_cast<std::streamsize>(framed.size()));
  if (!out_) fail(ErrorCode::Io, "write failed on " + path_.string());
}

void TfRecordWriter::close() {
  out_.flush();
  if (!out_) fail(ErrorCode::Io, "flush failed on " + path_.string());
  out_.close();
}

TfRecordReader::TfRecordReader(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) fail(ErrorCode::Io, "cannot open " + path.string());
  std::error_code ec;
  file_size_ = std::filesystem::file_size(path, ec);
  if (ec) fail(ErrorCode::Io, "cannot stat " + path.string() + ": " + ec.message());
}

std::optional<std::string> TfRecordReader::next() {
  const std::uint64_t start = offset_;
  if (start == file_size_) return std::nullopt;
  if (file_size_ - start < kHeaderSize) {
    fail(ErrorCode::TruncatedRecord, "header at offset " + std::to_string(start));
  }
  char header[kHeaderSize];
  if (!in_.read(header, kHeaderSize)) {
    fail(ErrorCode::Io, "read failed at offset " + std::to_string(start));
  }
  if (crc32c::unmask(le::get_u32(header + 8)) != crc32c::value(std::string_view(header, 8))) {
    fail(ErrorCode::CrcMismatch, "length checksum at offset " + std::to_string(start));
  }
  const std::uint64_t length = le::get_u64(header);
  if (file_size_ - start - kHeaderSize < length + kFooterSize ||
      length > file_size_) {
    fail(ErrorCode::TruncatedRecord, "payload at offset " + std::to_string(start));
  }
  std::string payload(length, '\0');
  char footer[kFooterSize];
  if (!in_.read(payload.data(), static_cast<std::streamsize>(length)) ||
      !in_.read(footer, kFooterSize)) {
    fail(ErrorCode::Io, "read failed at offset " + std::to_string(start));
  }
  if (crc32c::unmask(le::get_u32(footer)) != crc32c::value(payload)) {
    fail(ErrorCode::CrcMismatch, "payload checksum at offset " + std::to_string(start));
  }
  offset_ = start + kHeaderSize + length + kFooterSize;
  return payload;
}

void write_tfrecord_file(const std::filesystem::path& path,
                         const std::vector<std::string>& payloads) {
  TfRecordWriter writer(path);
  for (const auto& p : payloads) writer.write(p);
  writer.close();
}

std::vector<std::string> read_tfrecord_file(const std::filesystem::path& path) {
  TfRecordReader reader(path);
  std::vector<std::string> out;
  while (auto rec = reader.next()) out.push_back(std::move(*rec));
  return out;
}

}  // namespace yt8m
