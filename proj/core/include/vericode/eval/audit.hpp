#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vericode/analytics/metrics.hpp"

namespace vericode {

struct AuditItem {
  std::string game;
  std::string stratum;  // "<mode>/<difficulty>/<won|lost>"
  bool operator==(const AuditItem&) const = default;
};

struct AuditSample {
  std::uint64_t seed = 0;
  double fraction = 0;
  std::vector<AuditItem> items;  // sorted by stratum, then game
};

/// Stratified sample of round(fraction * N) finished games over (mode,
/// difficulty, outcome). Strata get seats in proportion to their weight,
/// with lost and forfeited games weighing twice as much as won ones, by
/// largest remainder and capped at the stratum size. Deterministic in seed.
/// Throws ConfigError for an empty corpus or fraction outside (0, 1].
AuditSample sample_audit(std::span<const GameSummary> games, double fraction, std::uint64_t seed);

/// Markdown review checklist, one unchecked line per sampled game.
std::string audit_checklist(const AuditSample& sample);

}  // namespace vericode
