#pragma once

#include <array>
#include <bitset>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vericode {

enum class Color : std::uint8_t { kBlue = 0, kYellow = 1, kPurple = 2 };

inline constexpr std::array<Color, 3> kColors{Color::kBlue, Color::kYellow, Color::kPurple};
inline constexpr int kMinDigit = 1;
inline constexpr int kMaxDigit = 5;
inline constexpr int kCodeCount = 125;

std::string_view color_name(Color color);  // "BLUE", "YELLOW", "PURPLE"
std::optional<Color> color_from_name(std::string_view name);  // exact upper-case match

/// A BLUE/YELLOW/PURPLE digit triple. Digits are 1..5 for valid codes; the type
/// can hold other values so that range errors can be reported by callers.
struct Code {
  int blue = 1;
  int yellow = 1;
  int purple = 1;

  constexpr int digit(Color c) const {
    switch (c) {
      case Color::kBlue: return blue;
      case Color::kYellow: return yellow;
      case Color::kPurple: return purple;
    }
    return 0;
  }

  constexpr bool valid() const {
    return blue >= kMinDigit && blue <= kMaxDigit && yellow >= kMinDigit &&
           yellow <= kMaxDigit && purple >= kMinDigit && purple <= kMaxDigit;
  }

  /// Position in lexicographic (blue, yellow, purple) order, 0..124. Requires valid().
  constexpr int index() const { return (blue - 1) * 25 + (yellow - 1) * 5 + (purple - 1); }

  static constexpr Code from_index(int index) {
    return Code{index / 25 + 1, index / 5 % 5 + 1, index % 5 + 1};
  }

  auto operator<=>(const Code&) const = default;
};

/// "BLUE=2, YELLOW=4, PURPLE=3", the protocol's code syntax.
std::string to_string(const Code& code);
/// "243".
std::string to_compact(const Code& code);
/// Parses the compact three-digit form; nullopt unless exactly three digits 1..5.
std::optional<Code> parse_compact(std::string_view text);

/// All 125 codes in lexicographic order.
const std::vector<Code>& enumerate_codes();

/// A subset of the code space, indexed by Code::index().
using CodeSet = std::bitset<kCodeCount>;

inline CodeSet all_codes_set() { return CodeSet{}.set(); }

std::vector<Code> to_codes(const CodeSet& set);

}  // namespace vericode
