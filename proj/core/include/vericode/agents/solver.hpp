#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vericode/engine/game.hpp"
#include "vericode/setup/generator.hpp"

namespace vericode {

enum class SubmitPolicy {
  /// Submit only once no (code, verifier) query can split the survivors.
  /// Every verifier's rule is then pinned down, not just the code.
  kResolveBeforeSubmit,
  /// Submit as soon as every survivor implies the same code.
  kCodeAgreement,
};

struct SolverOptions {
  /// Restrict hypotheses to assignments with a unique, non-redundant
  /// solution. Off: any assignment with at least one solution survives.
  bool use_meta_rules = true;
  SubmitPolicy policy = SubmitPolicy::kResolveBeforeSubmit;
};

struct QueryChoice {
  Code proposal;
  int verifier = 0;         // 1-based
  std::size_t min_split = 0;  // survivors removed in the worse of PASS/FAIL
};

/// Exact candidate-set reasoning over (assignment, permutation) hypotheses.
/// Classic games use the identity permutation only. Survivors are kept as
/// one bitset over the base assignments per permutation, so a refuted
/// permutation costs nothing further.
class CandidateSolver {
 public:
  CandidateSolver(const PublicSetupView& view, const Catalog& catalog, SolverOptions options = {});

  std::size_t verifiers() const { return cards_.size(); }
  std::size_t base_assignments() const { return base_.size(); }
  std::size_t permutations() const { return perms_.size(); }
  std::size_t survivors() const { return alive_count_; }

  /// Removes every hypothesis predicting the opposite result.
  void observe(const Code& proposal, int verifier, bool pass);

  bool contains(const Assignment& active, const std::vector<std::size_t>& permutation) const;

  /// Union of the solution sets of all survivors.
  CodeSet implied_codes() const;

  /// Best query by the greedy max-min rule; ties go to the lowest verifier,
  /// then the smallest code. With a fixed proposal only verifiers vary.
  /// nullopt when nothing splits the survivors.
  std::optional<QueryChoice> best_query(const std::optional<Code>& fixed_proposal = std::nullopt) const;

  /// The code to submit, if the policy allows submitting now.
  std::optional<Code> submission() const;

  /// For verifier N (1-based, as queried): the distinct criteria it may be
  /// applying among survivors, in catalog order.
  std::vector<const Criterion*> possible_rules(int verifier) const;

 private:
  struct Base {
    Assignment active;
    CodeSet solutions;
  };

  template <typename F>
  void for_each_survivor(F&& f) const;
  // hist[q][t][j]: survivors whose verifier q evaluates card t with criterion j.
  std::vector<std::vector<std::vector<std::size_t>>> histogram() const;

  std::vector<const VerifierCard*> cards_;
  SolverOptions options_;
  std::vector<Base> base_;
  std::vector<std::vector<std::size_t>> perms_;
  std::vector<std::vector<std::uint64_t>> alive_;  // [perm][word]
  std::size_t alive_count_ = 0;
};

}  // namespace vericode
