#include "vericode/analytics/metrics.hpp"

#include <map>
#include <tuple>

namespace vericode {

GameSummary summarize(const Transcript& t) {
  const auto* out = t.outcome();
  if (out == nullptr) throw FormatError("transcript for " + t.header.setup_id + " has no outcome");
  GameSummary s;
  s.game = t.header.setup_id;
  s.mode = t.header.mode;
  s.difficulty = t.header.difficulty;
  s.strategy = t.header.strategy;
  s.agent = t.header.agent;
  s.status = out->status;
  s.reason = out->reason;
  s.rounds = out->rounds;
  s.queries = out->queries;
  s.submitted = out->submitted;
  for (const auto& e : t.events) {
    if (const auto* r = std::get_if<RetryEvent>(&e.body)) {
      (r->error == "invalid_verifier" ? s.illegal_actions : s.format_errors)++;
    } else if (const auto* resp = std::get_if<ResponseEvent>(&e.body)) {
      s.infra_retries += resp->infra_retries;
    } else if (const auto* inf = std::get_if<InfraEvent>(&e.body)) {
      s.infra_retries += inf->attempt;
    }
  }
  return s;
}

nlohmann::json summary_to_json(const GameSummary& s) {
  return {{"game", s.game},
          {"mode", mode_name(s.mode)},
          {"difficulty", difficulty_name(s.difficulty)},
          {"strategy", strategy_name(s.strategy)},
          {"agent", s.agent},
          {"status", status_name(s.status)},
          {"reason", end_reason_name(s.reason)},
          {"rounds", s.rounds},
          {"queries", s.queries},
          {"format_errors", s.format_errors},
          {"illegal_actions", s.illegal_actions},
          {"infra_retries", s.infra_retries},
          {"submitted", s.submitted ? nlohmann::json(to_compact(*s.submitted)) : nlohmann::json()}};
}

GameSummary summary_from_json(const nlohmann::json& j) {
  try {
    GameSummary s;
    s.game = j.at("game").get<std::string>();
    auto need = [](auto v, const char* what) {
      if (!v) throw FormatError(std::string("bad ") + what + " in game summary");
      return *v;
    };
    s.mode = need(parse_mode(j.at("mode").get<std::string>()), "mode");
    s.difficulty = need(parse_difficulty(j.at("difficulty").get<std::string>()), "difficulty");
    s.strategy = need(parse_strategy(j.at("strategy").get<std::string>()), "strategy");
    s.agent = j.at("agent").get<std::string>();
    s.status = need(parse_status(j.at("status").get<std::string>()), "status");
    s.reason = need(parse_end_reason(j.at("reason").get<std::string>()), "reason");
    s.rounds = j.at("rounds").get<int>();
    s.queries = j.at("queries").get<int>();
    s.format_errors = j.at("format_errors").get<int>();
    s.illegal_actions = j.at("illegal_actions").get<int>();
    s.infra_retries = j.at("infra_retries").get<int>();
    if (!j.at("submitted").is_null()) {
      s.submitted = need(parse_compact(j.at("submitted").get<std::string>()), "submitted code");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad game summary: ") + e.what());
  }
}

namespace {

struct Acc {
  std::size_t games = 0, wins = 0, forfeits = 0;
  long win_turns = 0, win_queries = 0, format_errors = 0, illegal = 0;

  void add(const GameSummary& g) {
    ++games;
    format_errors += g.format_errors;
    illegal += g.illegal_actions;
    if (g.status == Status::kForfeit) ++forfeits;
    if (g.status == Status::kWon) {
      ++wins;
      win_turns += g.rounds;
      win_queries += g.queries;
    }
  }

  StratumStats stats() const {
    StratumStats s;
    s.games = games;
    s.wins = wins;
    s.forfeits = forfeits;
    s.accuracy = static_cast<double>(wins) / static_cast<double>(games);
    s.forfeit_rate = static_cast<double>(forfeits) / static_cast<double>(games);
    if (wins > 0) {
      s.win_avg_turns = static_cast<double>(win_turns) / static_cast<double>(wins);
      s.win_avg_verifiers = static_cast<double>(win_queries) / static_cast<double>(wins);
    }
    s.format_errors = format_errors;
    s.illegal_actions = illegal;
    return s;
  }
};

nlohmann::json stratum_json(const StratumStats& s) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
  return {{"games", s.games},
          {"wins", s.wins},
          {"forfeits", s.forfeits},
          {"accuracy", s.accuracy},
          {"forfeit_rate", s.forfeit_rate},
          {"win_avg_turns", opt(s.win_avg_turns)},
          {"win_avg_verifiers", opt(s.win_avg_verifiers)},
          {"format_errors", s.format_errors},
          {"illegal_actions", s.illegal_actions}};
}

}  // namespace

RunMetrics compute_metrics(std::span<const GameSummary> games) {
  std::map<std::tuple<std::string, Mode, Strategy>, std::array<Acc, 4>> groups;
  for (const auto& g : games) {
    if (g.status == Status::kInProgress) continue;
    auto& acc = groups[{g.agent, g.mode, g.strategy}];
    acc[0].add(g);
    acc[1 + static_cast<std::size_t>(g.difficulty)].add(g);
  }
  RunMetrics m;
  for (const auto& [key, acc] : groups) {
    MetricsGroup grp;
    std::tie(grp.agent, grp.mode, grp.strategy) = key;
    grp.total = acc[0].stats();
    for (std::size_t d = 0; d < 3; ++d) {
      if (acc[d + 1].games > 0) grp.by_difficulty[d] = acc[d + 1].stats();
    }
    m.groups.push_back(std::move(grp));
  }
  return m;
}

nlohmann::json metrics_to_json(const RunMetrics& m) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& g : m.groups) {
    nlohmann::json row = {{"agent", g.agent},
                          {"mode", mode_name(g.mode)},
                          {"strategy", strategy_name(g.strategy)},
                          {"total", stratum_json(g.total)}};
    for (std::size_t d = 0; d < 3; ++d) {
      const auto name = std::string(difficulty_name(static_cast<Difficulty>(d)));
      row[name] = g.by_difficulty[d] ? stratum_json(*g.by_difficulty[d]) : nlohmann::json();
    }
    out.push_back(std::move(row));
  }
  return {{"groups", out}};
}

}  // namespace vericode
