#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace vericode {

// Standard distributions are implementation-defined, so every draw that feeds
// a persisted artifact goes through these helpers instead.

using Rng = std::mt19937_64;

/// One SplitMix64 step; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t value);

/// Child seed for a labelled sub-stream, e.g. derive_seed(run_seed, "agent", 17).
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label, std::uint64_t index = 0);

/// Uniform integer in [0, bound). bound must be > 0.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// Uniform double in [0, 1).
double uniform_unit(Rng& rng);

template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace vericode
