#include "vericode/service/runner.hpp"

#include <atomic>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "vericode/agents/baseline_agents.hpp"
#include "vericode/agents/llm_agent.hpp"
#include "vericode/service/session.hpp"
#include "vericode/util/checksum.hpp"
#include "vericode/util/fs.hpp"
#include "vericode/util/rng.hpp"

namespace vericode {

namespace fs = std::filesystem;

nlohmann::json RunConfig::to_json() const {
  return {{"batch", batch},
          {"agent", agent},
          {"agent_config", agent_config},
          {"strategy", strategy_name(strategy)},
          {"parallelism", parallelism},
          {"seed", hex64(seed)},
          {"templates", templates},
          {"catalog", catalog}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  try {
    RunConfig c;
    c.batch = j.at("batch").get<std::string>();
    c.agent = j.at("agent").get<std::string>();
    c.agent_config = j.value("agent_config", nlohmann::json::object());
    const auto st = parse_strategy(j.at("strategy").get<std::string>());
    if (!st) throw ConfigError("strategy must be \"oa\" or \"cot\"");
    c.strategy = *st;
    c.parallelism = j.value("parallelism", 1);
    const auto& seed = j.at("seed");
    if (seed.is_string()) {
      const auto s = parse_hex64(seed.get<std::string>());
      if (!s) throw ConfigError("seed must be 16 hex digits or a number");
      c.seed = *s;
    } else {
      c.seed = seed.get<std::uint64_t>();
    }
    c.templates = j.value("templates", "");
    c.catalog = j.value("catalog", "");
    if (c.parallelism < 1) throw ConfigError("parallelism must be at least 1");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad run config: ") + e.what());
  }
}

bool RunConfig::same_run(const RunConfig& o) const {
  return batch == o.batch && agent == o.agent && agent_config == o.agent_config && strategy == o.strategy &&
         seed == o.seed && templates == o.templates && catalog == o.catalog;
}

nlohmann::json RunStatus::to_json() const {
  return {{"id", id},           {"config", config.to_json()}, {"state", state},    {"games", games},
          {"finished", finished}, {"created", created},         {"updated", updated}};
}

RunStatus RunStatus::from_json(const nlohmann::json& j) {
  try {
    RunStatus s;
    s.id = j.at("id").get<std::string>();
    s.config = RunConfig::from_json(j.at("config"));
    s.state = j.at("state").get<std::string>();
    s.games = j.at("games").get<std::size_t>();
    s.finished = j.at("finished").get<std::size_t>();
    s.created = j.at("created").get<std::string>();
    s.updated = j.at("updated").get<std::string>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad run.json: ") + e.what());
  }
}

AgentFactory make_agent_factory(const std::string& agent, const nlohmann::json& config, const Catalog& catalog) {
  AgentFactory f;
  if (agent == "random") {
    f = [](std::uint64_t seed) { return std::make_unique<RandomAgent>(seed); };
  } else if (agent == "oracle") {
    SolverOptions opt;
    try {
      for (const auto& [k, v] : config.items()) {
        if (k == "meta_rules") {
          opt.use_meta_rules = v.get<bool>();
        } else if (k == "submit_policy") {
          const auto p = v.get<std::string>();
          if (p == "resolve") opt.policy = SubmitPolicy::kResolveBeforeSubmit;
          else if (p == "code_agreement") opt.policy = SubmitPolicy::kCodeAgreement;
          else throw ConfigError("submit_policy must be \"resolve\" or \"code_agreement\"");
        } else {
          throw ConfigError("unknown oracle setting '" + k + "'");
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad oracle config: ") + e.what());
    }
    f = [&catalog, opt](std::uint64_t) { return std::make_unique<OracleAgent>(catalog, opt); };
  } else if (agent == "llm") {
    const auto cfg = CompletionConfig::from_json(config);
    auto client = std::make_shared<HttpCompletionClient>(cfg);  // checks the credential now
    f = [cfg, client](std::uint64_t) { return std::make_unique<LlmAgent>(cfg, client); };
  } else {
    throw ConfigError("unknown agent '" + agent + "' (random, oracle, llm)");
  }
  return f;
}

fs::path transcript_path(const fs::path& run_dir, const std::string& setup_id) {
  return run_dir / "transcripts" / (setup_id + ".jsonl");
}

RunStatus read_run_status(const fs::path& dir) {
  try {
    return RunStatus::from_json(nlohmann::json::parse(read_file(dir / "run.json")));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError((dir / "run.json").string() + ": " + e.what());
  }
}

std::vector<GameSummary> read_run_index(const fs::path& dir) {
  std::vector<GameSummary> out;
  const auto path = dir / "index.jsonl";
  if (!fs::exists(path)) return out;
  const auto text = read_file(path);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string::npos) break;  // torn tail
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    try {
      out.push_back(summary_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
  }
  return out;
}

namespace {

void write_status(const fs::path& dir, const RunStatus& s) { write_file_atomic(dir / "run.json", s.to_json().dump(2) + "\n"); }

// Rewrites the index when its tail was torn, so appends start on a fresh line.
void repair_index(const fs::path& dir, const std::vector<GameSummary>& kept) {
  const auto path = dir / "index.jsonl";
  if (!fs::exists(path)) return;
  const auto text = read_file(path);
  if (text.empty() || text.back() == '\n') return;
  std::string fixed;
  for (const auto& s : kept) fixed += summary_to_json(s).dump() + "\n";
  write_file_atomic(path, fixed);
}

}  // namespace

RunResult run_benchmark(const fs::path& dir, const RunConfig& config, std::span<const GameSetup> setups,
                        const Catalog& catalog, const AgentFactory& factory, const RunHooks& hooks,
                        const TemplatePack& pack) {
  RunResult result;
  RunConfig cfg = config;
  cfg.templates = pack.checksum();
  cfg.catalog = catalog.fingerprint();
  const auto batch_text = serialize_batch(setups);
  {
    std::set<std::string> ids;
    for (const auto& s : setups) {
      if (!ids.insert(s.id).second) throw ConfigError("setup " + s.id + " appears twice in the batch");
      if (s.catalog != cfg.catalog) throw ConfigError("setup " + s.id + " was built for catalog " + s.catalog);
    }
  }

  RunStatus status;
  std::error_code ec;
  if (fs::exists(dir / "run.json")) {
    status = read_run_status(dir);
    if (!status.config.same_run(cfg)) throw ConfigError(dir.string() + " holds a different run");
    if (read_file(dir / "setups.jsonl") != batch_text) throw ConfigError(dir.string() + " holds a different batch");
    status.config.parallelism = cfg.parallelism;
  } else {
    fs::create_directories(dir / "transcripts", ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    write_file_atomic(dir / "setups.jsonl", batch_text);
    status.id = dir.filename().string();
    status.config = cfg;
    status.created = utc_now();
  }
  fs::create_directories(dir / "transcripts", ec);
  status.state = "running";
  status.games = setups.size();

  // What is already done: finished transcripts. Unfinished ones restart.
  auto index = read_run_index(dir);
  repair_index(dir, index);
  std::set<std::string> indexed;
  for (const auto& s : index) indexed.insert(s.game);
  std::vector<std::size_t> todo;
  std::vector<GameSummary> done;
  for (std::size_t i = 0; i < setups.size(); ++i) {
    const auto path = transcript_path(dir, setups[i].id);
    if (fs::exists(path)) {
      const auto t = recover_transcript(path);
      if (t.outcome() != nullptr) {
        auto s = summarize(t);
        if (!indexed.count(s.game)) append_durably(dir / "index.jsonl", summary_to_json(s).dump() + "\n");
        done.push_back(std::move(s));
        continue;
      }
      fs::remove(path, ec);
      ++result.restarted;
    }
    todo.push_back(i);
  }
  status.finished = done.size();
  status.updated = utc_now();
  write_status(dir, status);

  std::mutex mu;  // index appends, status, error slot
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;

  auto worker = [&] {
    try {
      while (!stop) {
        const auto k = next++;
        if (k >= todo.size()) return;
        const auto i = todo[k];
        const auto& setup = setups[i];
        const auto seed = derive_seed(cfg.seed, "agent", i);
        auto agent = factory(seed);
        GameSession session(setup, catalog, cfg.strategy, agent->name(), agent->config(), seed, pack);
        agent->reset(session.view(), cfg.strategy);
        auto writer = TranscriptWriter::create(transcript_path(dir, setup.id), session.transcript().header);
        writer.commit(session.transcript().events);
        while (!session.finished()) {
          if (hooks.interrupted && hooks.interrupted()) {
            stop = true;
            return;
          }
          GameSession::Step step;
          try {
            const auto reply = agent->respond(session.prompt());
            step = session.post(reply.text,
                                {reply.latency_ms, reply.prompt_tokens, reply.completion_tokens, reply.infra_retries});
          } catch (const InfraError& e) {
            step = session.fail_infra(e.what(), e.attempts());
          }
          writer.commit(step.events);
        }
        const auto summary = summarize(session.transcript());
        std::lock_guard lock(mu);
        append_durably(dir / "index.jsonl", summary_to_json(summary).dump() + "\n");
        done.push_back(summary);
        status.finished = done.size();
        if (hooks.on_game) hooks.on_game(summary);
      }
    } catch (...) {
      std::lock_guard lock(mu);
      if (!failure) failure = std::current_exception();
      stop = true;
    }
  };

  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.parallelism), std::max<std::size_t>(todo.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  result.interrupted = stop && status.finished < setups.size();
  status.updated = utc_now();
  if (!result.interrupted) {
    status.state = "complete";
    result.metrics = compute_metrics(done);
    write_file_atomic(dir / "metrics.json", metrics_to_json(result.metrics).dump(2) + "\n");
  } else {
    result.metrics = compute_metrics(done);
  }
  write_status(dir, status);
  result.status = status;
  return result;
}

}  // namespace vericode
