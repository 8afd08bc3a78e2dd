#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vericode/setup/setup.hpp"

namespace vericode {

/// Intersection of the extensions; the ground truth for every uniqueness claim.
CodeSet solve(std::span<const PredicateExpr> criteria);
CodeSet intersect(std::span<const CodeSet> extensions);

using Assignment = std::vector<std::size_t>;

struct SetupCheck {
  enum class Violation { kNone, kUniqueness, kNecessity };

  Violation violation = Violation::kNone;
  CodeSet solutions;
  /// Uniqueness failures: the second solution in lexicographic order (absent
  /// when there is no solution at all).
  std::optional<Code> second_solution;
  /// Necessity failures: the first slot whose criterion can be dropped
  /// without enlarging the solution set beyond one code.
  std::optional<std::size_t> redundant_slot;

  bool valid() const { return violation == Violation::kNone; }
};

SetupCheck check_extensions(std::span<const CodeSet> active_extensions);
SetupCheck check_setup(const Assignment& assignment, std::span<const VerifierCard* const> cards);

/// Uniform over the n! permutations of 0..n-1.
std::vector<std::size_t> sample_permutation(std::size_t n, std::uint64_t seed);

/// Raised when no valid assignment turns up within the restart bound.
class GenerationError : public Error {
 public:
  using Error::Error;
};

struct GeneratorOptions {
  std::size_t max_restarts = 1000;
};

/// Deterministic in (mode, difficulty, seed, catalog fingerprint).
GameSetup generate_setup(Mode mode, Difficulty difficulty, std::uint64_t seed,
                         const Catalog& catalog, const GeneratorOptions& options = {});

/// per_difficulty setups for each of Easy, Medium, Hard, in that order. Each
/// setup's seed is derive_seed(seed, "setup/<mode>/<difficulty>", i).
std::vector<GameSetup> generate_batch(Mode mode, std::size_t per_difficulty, std::uint64_t seed,
                                      const Catalog& catalog,
                                      const GeneratorOptions& options = {});

}  // namespace vericode
