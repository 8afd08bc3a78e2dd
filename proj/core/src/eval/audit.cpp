#include "vericode/eval/audit.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "vericode/util/rng.hpp"

namespace vericode {

AuditSample sample_audit(std::span<const GameSummary> games, double fraction, std::uint64_t seed) {
  if (!(fraction > 0 && fraction <= 1)) throw ConfigError("audit fraction must be in (0, 1]");
  std::map<std::string, std::vector<std::string>> strata;
  bool any_loss = false;
  for (const auto& g : games) {
    if (g.status == Status::kInProgress) continue;
    const bool won = g.status == Status::kWon;
    any_loss = any_loss || !won;
    strata[std::string(mode_name(g.mode)) + "/" + std::string(difficulty_name(g.difficulty)) + "/" +
           (won ? "won" : "lost")]
        .push_back(g.game);
  }
  std::size_t total = 0;
  for (auto& [k, v] : strata) {
    std::sort(v.begin(), v.end());
    total += v.size();
  }
  if (total == 0) throw ConfigError("audit corpus is empty");
  const auto target = std::min<std::size_t>(
      total, std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)))));

  // Strata whose proportional share would exceed their size are taken
  // whole; the rest split what remains by largest remainder.
  auto weight = [&](const std::string& key) {
    const bool lost = key.size() >= 4 && key.compare(key.size() - 4, 4, "lost") == 0;
    return (any_loss && lost) ? 2.0 : 1.0;
  };
  std::map<std::string, std::size_t> seats;
  std::map<std::string, bool> open;
  for (const auto& [k, v] : strata) open[k] = true;
  std::size_t left = target;
  std::map<std::string, double> share;
  for (bool capped = true; capped;) {
    capped = false;
    double wsum = 0;
    for (const auto& [k, v] : strata) {
      if (open[k]) wsum += weight(k) * static_cast<double>(v.size());
    }
    for (const auto& [k, v] : strata) {
      if (!open[k]) continue;
      share[k] = static_cast<double>(left) * weight(k) * static_cast<double>(v.size()) / wsum;
      if (share[k] >= static_cast<double>(v.size())) {
        seats[k] = v.size();
        left -= v.size();
        open[k] = false;
        capped = true;
        break;
      }
    }
  }
  std::vector<std::pair<double, std::string>> rema;
  for (const auto& [k, v] : strata) {
    if (!open[k]) continue;
    seats[k] = static_cast<std::size_t>(std::floor(share[k]));
    left -= seats[k];
    rema.emplace_back(share[k] - std::floor(share[k]), k);
  }
  std::stable_sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; i < rema.size() && left > 0; ++i, --left) ++seats[rema[i].second];

  AuditSample out;
  out.seed = seed;
  out.fraction = fraction;
  for (const auto& [k, v] : strata) {
    auto pool = v;
    Rng rng(derive_seed(seed, "audit/" + k));
    shuffle(std::span<std::string>(pool), rng);
    pool.resize(seats[k]);
    std::sort(pool.begin(), pool.end());
    for (auto& g : pool) out.items.push_back({std::move(g), k});
  }
  return out;
}

std::string audit_checklist(const AuditSample& sample) {
  std::string out = "# Audit sample\n\nseed " + std::to_string(sample.seed) + ", fraction " +
                    std::to_string(sample.fraction) + ", " + std::to_string(sample.items.size()) + " games\n";
  std::string stratum;
  for (const auto& item : sample.items) {
    if (item.stratum != stratum) {
      stratum = item.stratum;
      out += "\n## " + stratum + "\n\n";
    }
    out += "- [ ] " + item.game + "\n";
  }
  return out;
}

}  // namespace vericode
