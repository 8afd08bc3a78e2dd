#include "vericode/agents/solver.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace vericode {

namespace {

class BaseEnumerator {
 public:
  BaseEnumerator(const std::vector<const VerifierCard*>& cards, bool meta)
      : cards_(cards), meta_(meta), current_(cards.size()) {}

  template <typename Sink>
  void run(Sink&& sink) {
    descend(0, all_codes_set(), sink);
  }

 private:
  template <typename Sink>
  void descend(std::size_t depth, const CodeSet& acc, Sink& sink) {
    const std::size_t n = cards_.size();
    if (depth == n) {
      if (!meta_) {
        sink(current_, acc);
      } else if (acc.count() == 1 && check_setup(current_, cards_).valid()) {
        sink(current_, acc);
      }
      return;
    }
    const auto& crit = cards_[depth]->criteria;
    for (std::size_t j = 0; j < crit.size(); ++j) {
      const CodeSet next = acc & crit[j].extension;
      if (next.none()) continue;
      // Same pruning as the generator: a prefix already down to one code, or
      // a criterion that cuts nothing, makes some verifier redundant.
      if (meta_ && ((depth + 1 < n && next.count() < 2) || next == acc)) continue;
      current_[depth] = j;
      descend(depth + 1, next, sink);
    }
  }

  const std::vector<const VerifierCard*>& cards_;
  bool meta_;
  Assignment current_;
};

}  // namespace

CandidateSolver::CandidateSolver(const PublicSetupView& view, const Catalog& catalog, SolverOptions options)
    : options_(options) {
  for (const auto& id : view.card_ids) cards_.push_back(&catalog.card(id));
  const std::size_t n = cards_.size();

  BaseEnumerator(cards_, options_.use_meta_rules).run([&](const Assignment& a, const CodeSet& sol) {
    base_.push_back({a, sol});
  });

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  if (view.mode == Mode::kClassic) {
    perms_.push_back(perm);
  } else {
    do {
      perms_.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  const std::size_t words = (base_.size() + 63) / 64;
  std::vector<std::uint64_t> full(words, ~std::uint64_t{0});
  if (base_.size() % 64 != 0) full.back() = (std::uint64_t{1} << (base_.size() % 64)) - 1;
  if (base_.empty()) full.clear();
  alive_.assign(perms_.size(), full);
  alive_count_ = base_.size() * perms_.size();
}

template <typename F>
void CandidateSolver::for_each_survivor(F&& f) const {
  for (std::size_t p = 0; p < alive_.size(); ++p) {
    const auto& words = alive_[p];
    for (std::size_t w = 0; w < words.size(); ++w) {
      std::uint64_t bits = words[w];
      while (bits != 0) {
        const auto b = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
        bits &= bits - 1;
        f(b, p);
      }
    }
  }
}

void CandidateSolver::observe(const Code& proposal, int verifier, bool pass) {
  const auto q = static_cast<std::size_t>(verifier - 1);
  const auto code = static_cast<std::size_t>(proposal.index());
  alive_count_ = 0;
  for (std::size_t p = 0; p < alive_.size(); ++p) {
    const std::size_t t = perms_[p][q];
    const auto& crit = cards_[t]->criteria;
    auto& words = alive_[p];
    for (std::size_t w = 0; w < words.size(); ++w) {
      std::uint64_t bits = words[w];
      std::uint64_t keep = bits;
      while (bits != 0) {
        const int bit = std::countr_zero(bits);
        bits &= bits - 1;
        const auto& b = base_[w * 64 + static_cast<std::size_t>(bit)];
        if (crit[b.active[t]].extension.test(code) != pass) keep &= ~(std::uint64_t{1} << bit);
      }
      words[w] = keep;
      alive_count_ += static_cast<std::size_t>(std::popcount(keep));
    }
  }
}

bool CandidateSolver::contains(const Assignment& active, const std::vector<std::size_t>& permutation) const {
  const auto pit = std::find(perms_.begin(), perms_.end(), permutation);
  if (pit == perms_.end()) return false;
  const auto p = static_cast<std::size_t>(pit - perms_.begin());
  for (std::size_t b = 0; b < base_.size(); ++b) {
    if (base_[b].active == active) return (alive_[p][b / 64] >> (b % 64)) & 1U;
  }
  return false;
}

CodeSet CandidateSolver::implied_codes() const {
  CodeSet out;
  std::vector<std::uint64_t> any(base_.empty() ? 0 : alive_.front().size(), 0);
  for (const auto& words : alive_) {
    for (std::size_t w = 0; w < words.size(); ++w) any[w] |= words[w];
  }
  for (std::size_t w = 0; w < any.size(); ++w) {
    std::uint64_t bits = any[w];
    while (bits != 0) {
      out |= base_[w * 64 + static_cast<std::size_t>(std::countr_zero(bits))].solutions;
      bits &= bits - 1;
    }
  }
  return out;
}

std::vector<std::vector<std::vector<std::size_t>>> CandidateSolver::histogram() const {
  const std::size_t n = cards_.size();
  std::vector<std::vector<std::vector<std::size_t>>> hist(
      n, std::vector<std::vector<std::size_t>>(n, std::vector<std::size_t>(Catalog::kMaxCriteria, 0)));
  std::vector<std::vector<std::size_t>> per_perm(n, std::vector<std::size_t>(Catalog::kMaxCriteria));
  for (std::size_t p = 0; p < alive_.size(); ++p) {
    for (auto& row : per_perm) std::fill(row.begin(), row.end(), 0);
    bool any = false;
    const auto& words = alive_[p];
    for (std::size_t w = 0; w < words.size(); ++w) {
      std::uint64_t bits = words[w];
      while (bits != 0) {
        const auto& b = base_[w * 64 + static_cast<std::size_t>(std::countr_zero(bits))];
        bits &= bits - 1;
        any = true;
        for (std::size_t t = 0; t < n; ++t) ++per_perm[t][b.active[t]];
      }
    }
    if (!any) continue;
    for (std::size_t q = 0; q < n; ++q) {
      const std::size_t t = perms_[p][q];
      for (std::size_t j = 0; j < Catalog::kMaxCriteria; ++j) hist[q][t][j] += per_perm[t][j];
    }
  }
  return hist;
}

std::optional<QueryChoice> CandidateSolver::best_query(const std::optional<Code>& fixed) const {
  if (alive_count_ < 2) return std::nullopt;
  const std::size_t n = cards_.size();
  const auto hist = histogram();
  std::optional<QueryChoice> best;
  for (std::size_t q = 0; q < n; ++q) {
    std::vector<std::size_t> pass(kCodeCount, 0);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t j = 0; j < cards_[t]->criteria.size(); ++j) {
        const auto count = hist[q][t][j];
        if (count == 0) continue;
        const auto& ext = cards_[t]->criteria[j].extension;
        for (std::size_t c = 0; c < static_cast<std::size_t>(kCodeCount); ++c) {
          if (ext.test(c)) pass[c] += count;
        }
      }
    }
    for (int c = 0; c < kCodeCount; ++c) {
      const Code code = Code::from_index(c);
      if (fixed && code != *fixed) continue;
      const auto p = pass[static_cast<std::size_t>(c)];
      const auto split = std::min(p, alive_count_ - p);
      if (split > 0 && (!best || split > best->min_split)) {
        best = QueryChoice{code, static_cast<int>(q + 1), split};
      }
    }
  }
  return best;
}

std::optional<Code> CandidateSolver::submission() const {
  const auto codes = implied_codes();
  if (codes.none()) return std::nullopt;
  if (options_.policy == SubmitPolicy::kCodeAgreement) {
    if (codes.count() == 1) return to_codes(codes).front();
    return std::nullopt;
  }
  if (best_query()) return std::nullopt;
  // Nothing left to learn. With meta-rules this is a single code; without
  // them the solver can only guess the smallest remaining one.
  return to_codes(codes).front();
}

std::vector<const Criterion*> CandidateSolver::possible_rules(int verifier) const {
  const auto q = static_cast<std::size_t>(verifier - 1);
  const auto hist = histogram();
  std::vector<const Criterion*> out;
  for (std::size_t t = 0; t < cards_.size(); ++t) {
    for (std::size_t j = 0; j < cards_[t]->criteria.size(); ++j) {
      if (hist.at(q)[t][j] > 0) out.push_back(&cards_[t]->criteria[j]);
    }
  }
  return out;
}

}  // namespace vericode
