#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vericode/dsl/catalog.hpp"

namespace vericode {

enum class Mode : std::uint8_t { kClassic, kNightmare };
enum class Difficulty : std::uint8_t { kEasy, kMedium, kHard };

inline constexpr Difficulty kDifficulties[] = {Difficulty::kEasy, Difficulty::kMedium,
                                               Difficulty::kHard};

std::string_view mode_name(Mode mode);              // "classic" / "nightmare"
std::string_view difficulty_name(Difficulty level);  // "easy" / "medium" / "hard"
std::optional<Mode> parse_mode(std::string_view text);
std::optional<Difficulty> parse_difficulty(std::string_view text);

/// Easy 4, Medium 5, Hard 6.
std::size_t verifier_count(Difficulty level);

/// One game's hidden configuration. Slots are 0-based here; the text protocol
/// numbers them from 1.
struct GameSetup {
  std::string id;
  Mode mode = Mode::kClassic;
  Difficulty difficulty = Difficulty::kEasy;
  std::vector<std::string> card_ids;     // in slot order
  std::vector<std::size_t> active;       // active criterion index per slot
  Code secret;
  std::vector<std::size_t> permutation;  // queried slot -> evaluated slot
  std::uint64_t seed = 0;
  std::string catalog;                   // Catalog::fingerprint()

  std::size_t slots() const { return card_ids.size(); }
  bool operator==(const GameSetup&) const = default;
};

/// Everything an agent or player is allowed to know before the game ends.
struct PublicSetupView {
  std::string id;
  Mode mode = Mode::kClassic;
  Difficulty difficulty = Difficulty::kEasy;
  std::vector<std::string> card_ids;
  std::string catalog;
};

PublicSetupView public_view(const GameSetup& setup);

/// The active criterion of the card sitting in `slot` (no remapping applied).
const Criterion& active_criterion(const GameSetup& setup, const Catalog& catalog,
                                  std::size_t slot);

/// Throws FormatError unless the setup is internally consistent with the
/// catalog: matching fingerprint, known cards, indices in range, a bijective
/// permutation (identity in Classic), verifier count matching the difficulty,
/// and the active criteria uniquely and non-redundantly determining the secret.
void validate_setup(const GameSetup& setup, const Catalog& catalog);

// Batch records are JSON objects with sorted keys; hidden fields live under
// "secret" so that dropping that key yields the public view:
//
//   {"catalog": "...", "cards": ["V02", ...], "difficulty": "easy",
//    "id": "...", "mode": "classic", "seed": "<16 hex>",
//    "secret": {"active": [0, 2, ...], "code": "243", "permutation": [1, 2, ...]}}
//
// Permutations are written 1-based, matching the slot numbers players see.

nlohmann::json setup_to_json(const GameSetup& setup);
GameSetup setup_from_json(const nlohmann::json& record);  // throws FormatError
nlohmann::json public_view_json(const PublicSetupView& view);
PublicSetupView public_view_from_json(const nlohmann::json& record);

/// One record per line.
std::string serialize_batch(std::span<const GameSetup> setups);
std::vector<GameSetup> parse_batch(std::string_view text);
void write_batch(const std::filesystem::path& path, std::span<const GameSetup> setups);
std::vector<GameSetup> read_batch(const std::filesystem::path& path);

}  // namespace vericode
