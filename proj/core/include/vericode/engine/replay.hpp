#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "vericode/engine/transcript.hpp"

namespace vericode {

struct ReplayReport {
  bool ok = true;
  std::optional<std::uint64_t> divergence_seq;
  std::string message;
  GameState final_state;
};

/// Re-runs the transcript's actions through a fresh engine and compares every
/// feedback and the outcome. A transcript recorded against a different
/// catalog or setup throws ConfigError.
ReplayReport replay(const Transcript& transcript, const GameSetup& setup, const Catalog& catalog);

}  // namespace vericode
