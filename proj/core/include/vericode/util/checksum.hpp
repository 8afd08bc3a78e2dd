#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace vericode {

std::uint32_t crc32(std::string_view data, std::uint32_t seed = 0);

/// Eight lowercase hex digits.
std::string hex32(std::uint32_t value);

/// Sixteen lowercase hex digits, the persisted form of 64-bit seeds.
std::string hex64(std::uint64_t value);
/// Inverse of hex64; nullopt unless exactly 16 hex digits.
std::optional<std::uint64_t> parse_hex64(std::string_view text);

}  // namespace vericode
