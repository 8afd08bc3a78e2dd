#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "vericode/agents/agent.hpp"
#include "vericode/analytics/metrics.hpp"
#include "vericode/protocol/templates.hpp"

namespace vericode {

/// Everything that determines a run, apart from external model behaviour.
struct RunConfig {
  std::string batch;  // content id of the setup batch
  std::string agent = "oracle";  // "random", "oracle" or "llm"
  nlohmann::json agent_config = nlohmann::json::object();
  Strategy strategy = Strategy::kAnswerOnly;
  int parallelism = 1;  // not part of a run's identity; may change on resume
  std::uint64_t seed = 0;
  std::string templates;  // template pack checksum
  std::string catalog;    // catalog fingerprint

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);  // throws ConfigError
  /// Same run, ignoring parallelism.
  bool same_run(const RunConfig& o) const;
};

struct RunStatus {
  std::string id;
  RunConfig config;
  std::string state;  // "running" or "complete"
  std::size_t games = 0;
  std::size_t finished = 0;
  std::string created;
  std::string updated;

  nlohmann::json to_json() const;
  static RunStatus from_json(const nlohmann::json& j);
};

/// Builds one agent per game from the per-game seed.
using AgentFactory = std::function<std::unique_ptr<Agent>(std::uint64_t seed)>;

/// "random", "oracle" ({"meta_rules": bool, "submit_policy": "resolve"|"code_agreement"})
/// or "llm" (a CompletionConfig document). Builds one agent up front, so a
/// missing credential fails here, before any game starts.
AgentFactory make_agent_factory(const std::string& agent, const nlohmann::json& config, const Catalog& catalog);

struct RunHooks {
  /// Polled between actions. Returning true abandons the run in place, as a
  /// crash would; a later call resumes it.
  std::function<bool()> interrupted;
  std::function<void(const GameSummary&)> on_game;
};

struct RunResult {
  RunStatus status;
  RunMetrics metrics;
  bool interrupted = false;
  std::size_t restarted = 0;  // unfinished games found on resume and replayed from scratch
};

// A run directory holds
//
//   run.json                 RunStatus, rewritten atomically
//   setups.jsonl             the batch being played
//   transcripts/<setup>.jsonl
//   index.jsonl              one GameSummary per finished game, appended
//   metrics.json             written when the run completes
//
// Each game's agent is seeded with derive_seed(seed, "agent", i) for the
// setup's position i, so results do not depend on scheduling or restarts.

/// Starts or resumes the run in `dir`. Resuming requires the same run
/// config and batch (ConfigError otherwise). Finished games are kept; an
/// unfinished game is restarted, since agent state cannot be recovered.
/// An agent that cannot be reached forfeits its game (infra); the run
/// carries on.
RunResult run_benchmark(const std::filesystem::path& dir, const RunConfig& config,
                        std::span<const GameSetup> setups, const Catalog& catalog, const AgentFactory& factory,
                        const RunHooks& hooks = {}, const TemplatePack& pack = TemplatePack::builtin());

RunStatus read_run_status(const std::filesystem::path& dir);
/// Index records; a torn last line (crash mid-append) is ignored.
std::vector<GameSummary> read_run_index(const std::filesystem::path& dir);
std::filesystem::path transcript_path(const std::filesystem::path& run_dir, const std::string& setup_id);

}  // namespace vericode
