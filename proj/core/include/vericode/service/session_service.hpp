#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "vericode/service/runner.hpp"
#include "vericode/service/session.hpp"
#include "vericode/service/store.hpp"

namespace vericode {

/// The session is busy with another action, or the client answered a
/// prompt that is no longer current.
class Conflict : public Error {
 public:
  using Error::Error;
};

/// Interactive sessions and background runs over one Store. Every method
/// takes and returns the JSON documents the HTTP layer sends, so the
/// transport stays a thin mapping. Thread safe.
///
/// Responses never carry hidden setup fields; the answer appears in a
/// session's state only once its game is over.
class SessionService {
 public:
  struct Options {
    bool resume_runs = true;  // restart runs left "running" by a previous process
  };

  /// Recovers every session transcript under the store: each file is
  /// truncated to its committed prefix and replayed.
  SessionService(Store& store, const Catalog& catalog, Options options,
                 const TemplatePack& pack = TemplatePack::builtin());
  SessionService(Store& store, const Catalog& catalog) : SessionService(store, catalog, Options{}) {}
  /// Stops background runs between actions; they resume on next start.
  ~SessionService();

  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  nlohmann::json health() const;

  // Setups. Only public views leave the service.
  nlohmann::json list_setups(const std::optional<std::string>& batch = std::nullopt) const;
  nlohmann::json get_setup(const std::string& id) const;
  /// {"mode", "per_difficulty", "seed"} -> {"batch", "setups": [...]}
  nlohmann::json generate_setups(const nlohmann::json& request);

  // Sessions.
  /// {"setup_id", "strategy": "oa"|"cot", "participant": {"kind": "human"|"agent", "name"}}
  nlohmann::json create_session(const nlohmann::json& request);
  nlohmann::json list_sessions() const;
  nlohmann::json get_session(const std::string& id) const;
  nlohmann::json get_prompt(const std::string& id) const;
  /// {"response": text, "note"?: text, "seq"?: last seq the client saw}.
  /// Throws Conflict while another action on the session is in flight or
  /// when seq is stale; the action is durable before this returns.
  nlohmann::json post_action(const std::string& id, const nlohmann::json& request);
  nlohmann::json get_transcript(const std::string& id) const;

  // Runs.
  /// RunConfig keys minus templates/catalog. The run id is derived from the
  /// config, so posting the same config again resumes that run.
  nlohmann::json start_run(const nlohmann::json& request);
  nlohmann::json list_runs() const;
  nlohmann::json get_run(const std::string& id) const;
  /// Blocks until a background run stops (tests and shutdown).
  void wait_run(const std::string& id);

  /// Session files that could not be recovered, with the reason.
  const std::vector<std::pair<std::string, std::string>>& recovery_errors() const { return recovery_errors_; }

 private:
  struct Live;
  struct RunTask;

  std::shared_ptr<Live> find(const std::string& id) const;
  nlohmann::json prompt_json(const std::string& id, const Live& live) const;
  nlohmann::json state_json(const std::string& id, const Live& live) const;
  void recover_sessions();
  void launch_run(const std::string& id, const RunConfig& config, std::vector<GameSetup> setups);

  Store& store_;
  const Catalog& catalog_;
  const TemplatePack& pack_;
  Options options_;

  mutable std::mutex mu_;  // guards the maps, not the sessions
  std::map<std::string, std::shared_ptr<Live>> sessions_;
  std::map<std::string, std::unique_ptr<RunTask>> runs_;
  std::atomic<bool> stopping_{false};
  std::vector<std::pair<std::string, std::string>> recovery_errors_;
};

}  // namespace vericode
