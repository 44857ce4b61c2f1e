#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace yt8m::crc32c {

/// CRC-32C (Castagnoli, reflected polynomial 0x82F63B78), continuing from a
/// previous value. extend(0, data) is the CRC of data.
std::uint32_t extend(std::uint32_t crc, std::span<const std::uint8_t> data) noexcept;

inline std::uint32_t value(std::span<const std::uint8_t> data) noexcept { return extend(0, data); }
std::uint32_t value(std::string_view data) noexcept;

inline constexpr std::uint32_t kMaskDelta = 0xa282ead8u;

/// TFRecord checksum masking: rotate right by 15 and add a constant.
inline constexpr std::uint32_t mask(std::uint32_t crc) noexcept {
  return ((crc >> 15) | (crc << 17)) + kMaskDelta;
}

inline constexpr std::uint32_t unmask(std::uint32_t masked) noexcept {
  const std::uint32_t rot = masked - kMaskDelta;
  return (rot >> 17) | (rot << 15);
}

}  // namespace yt8m::crc32c
