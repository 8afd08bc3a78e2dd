#include "vericode/setup/generator.hpp"

#include "vericode/util/checksum.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <string>

#include "vericode/util/rng.hpp"

namespace vericode {

CodeSet intersect(std::span<const CodeSet> extensions) {
  CodeSet acc = all_codes_set();
  for (const auto& e : extensions) acc &= e;
  return acc;
}

CodeSet solve(std::span<const PredicateExpr> criteria) {
  CodeSet acc;
  for (const Code& c : enumerate_codes()) {
    bool ok = true;
    for (const auto& e : criteria) ok = ok && evaluate(e, c);
    acc.set(static_cast<std::size_t>(c.index()), ok);
  }
  return acc;
}

SetupCheck check_extensions(std::span<const CodeSet> active) {
  SetupCheck out;
  out.solutions = intersect(active);
  if (out.solutions.count() != 1) {
    out.violation = SetupCheck::Violation::kUniqueness;
    if (out.solutions.count() > 1) {
      int seen = 0;
      for (int i = 0; i < kCodeCount; ++i) {
        if (out.solutions.test(static_cast<std::size_t>(i)) && ++seen == 2) {
          out.second_solution = Code::from_index(i);
          break;
        }
      }
    }
    return out;
  }
  const std::size_t n = active.size();
  // prefix[i] = e0 & ... & e(i-1); suffix[i] = ei & ... & e(n-1)
  std::vector<CodeSet> prefix(n + 1, all_codes_set()), suffix(n + 1, all_codes_set());
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] & active[i];
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] & active[i];
  for (std::size_t i = 0; i < n; ++i) {
    if ((prefix[i] & suffix[i + 1]).count() < 2) {
      out.violation = SetupCheck::Violation::kNecessity;
      out.redundant_slot = i;
      return out;
    }
  }
  return out;
}

SetupCheck check_setup(const Assignment& assignment, std::span<const VerifierCard* const> cards) {
  std::vector<CodeSet> ext;
  ext.reserve(cards.size());
  for (std::size_t i = 0; i < cards.size(); ++i) {
    ext.push_back(cards[i]->criteria.at(assignment.at(i)).extension);
  }
  return check_extensions(ext);
}

std::vector<std::size_t> sample_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(std::span(perm), rng);
  return perm;
}

namespace {

// Depth-first over criterion indices, trying each card's criteria in the
// given order. A prefix whose intersection is already a single code (or
// empty) cannot be extended into a non-redundant assignment.
class AssignmentSearch {
 public:
  AssignmentSearch(std::vector<const VerifierCard*> cards, std::vector<std::vector<std::size_t>> order)
      : cards_(std::move(cards)), order_(std::move(order)), chosen_(cards_.size()) {}

  std::optional<Assignment> run() {
    if (descend(0, all_codes_set())) return chosen_;
    return std::nullopt;
  }

 private:
  bool descend(std::size_t depth, const CodeSet& acc) {
    if (depth == cards_.size()) {
      if (acc.count() != 1) return false;
      return check_setup(chosen_, cards_).valid();
    }
    for (std::size_t idx : order_[depth]) {
      const CodeSet next = acc & cards_[depth]->criteria[idx].extension;
      const auto size = next.count();
      if (size == 0) continue;
      if (depth + 1 < cards_.size() && size < 2) continue;
      // The criterion must cut something, or dropping it changes nothing.
      if (next == acc) continue;
      chosen_[depth] = idx;
      if (descend(depth + 1, next)) return true;
    }
    return false;
  }

  std::vector<const VerifierCard*> cards_;
  std::vector<std::vector<std::size_t>> order_;
  Assignment chosen_;
};

}  // namespace

GameSetup generate_setup(Mode mode, Difficulty difficulty, std::uint64_t seed,
                         const Catalog& catalog, const GeneratorOptions& options) {
  const std::size_t n = verifier_count(difficulty);
  const auto deck = catalog.cards();
  if (deck.size() < n) throw GenerationError("catalog has fewer cards than verifier slots");

  Rng rng(seed);
  std::vector<std::size_t> pool(deck.size());
  for (std::size_t attempt = 0; attempt < options.max_restarts; ++attempt) {
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    shuffle(std::span(pool), rng);
    std::vector<std::size_t> picked(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
    std::sort(picked.begin(), picked.end());

    std::vector<const VerifierCard*> cards;
    std::vector<std::vector<std::size_t>> order;
    for (auto ci : picked) {
      cards.push_back(&deck[ci]);
      std::vector<std::size_t> idx(deck[ci].criteria.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      shuffle(std::span(idx), rng);
      order.push_back(std::move(idx));
    }

    auto found = AssignmentSearch(cards, order).run();
    if (!found) continue;

    GameSetup s;
    s.mode = mode;
    s.difficulty = difficulty;
    s.seed = seed;
    s.catalog = catalog.fingerprint();
    for (const auto* c : cards) s.card_ids.push_back(c->id);
    s.active = std::move(*found);
    s.secret = to_codes(check_setup(s.active, cards).solutions).front();
    if (mode == Mode::kNightmare) {
      s.permutation = sample_permutation(n, derive_seed(seed, "permutation"));
    } else {
      s.permutation.resize(n);
      std::iota(s.permutation.begin(), s.permutation.end(), std::size_t{0});
    }
    s.id = std::string(mode_name(mode)) + "-" + std::string(difficulty_name(difficulty)) + "-" + hex64(seed);
    return s;
  }
  throw GenerationError("no valid assignment after " + std::to_string(options.max_restarts) +
                        " card samples (" + std::string(mode_name(mode)) + ", " +
                        std::string(difficulty_name(difficulty)) + ")");
}

std::vector<GameSetup> generate_batch(Mode mode, std::size_t per_difficulty, std::uint64_t seed,
                                      const Catalog& catalog, const GeneratorOptions& options) {
  if (per_difficulty == 0) throw GenerationError("per-difficulty count must be at least 1");
  std::vector<GameSetup> out;
  std::set<std::string> ids;
  for (auto d : kDifficulties) {
    const std::string label =
        "setup/" + std::string(mode_name(mode)) + "/" + std::string(difficulty_name(d));
    for (std::size_t i = 0; i < per_difficulty; ++i) {
      auto s = generate_setup(mode, d, derive_seed(seed, label, i), catalog, options);
      if (!ids.insert(s.id).second) throw GenerationError("setup id collision: " + s.id);
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace vericode
