#include "vericode/service/session_service.hpp"

#include <random>
#include <regex>

#include "vericode/setup/generator.hpp"
#include "vericode/util/checksum.hpp"
#include "vericode/util/fs.hpp"

namespace vericode {

namespace fs = std::filesystem;
using nlohmann::json;

struct SessionService::Live {
  Live(GameSession s, fs::path p, std::optional<TranscriptWriter> w, std::string k, std::string n)
      : session(std::move(s)), path(std::move(p)), writer(std::move(w)), kind(std::move(k)), name(std::move(n)) {}

  std::mutex mu;  // one action at a time
  GameSession session;
  fs::path path;
  std::optional<TranscriptWriter> writer;  // empty after a failed commit until reopened
  std::string kind;
  std::string name;
};

struct SessionService::RunTask {
  std::thread thread;
  std::atomic<bool> done{false};
  std::string error;  // written before done
};

namespace {

const std::regex kNamePattern("[A-Za-z0-9._@-]{1,64}");
const std::regex kIdPattern("[A-Za-z0-9._-]{1,128}");

std::string get_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw ConfigError(std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

std::uint64_t get_seed(const json& j) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_string()) {
    if (const auto s = parse_hex64(j.get<std::string>())) return *s;
  }
  throw ConfigError("seed must be a non-negative integer or 16 hex digits");
}

std::uint64_t random_u64() {
  static std::mutex mu;
  static std::random_device rd;
  std::lock_guard lock(mu);
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

// Header "agent" field -> (kind, name)
std::pair<std::string, std::string> split_participant(const std::string& agent) {
  const auto colon = agent.find(':');
  if (colon == std::string::npos) return {"agent", agent};
  const auto kind = agent.substr(0, colon);
  if (kind == "human" || kind == "agent") return {kind, agent.substr(colon + 1)};
  return {"agent", agent};
}

void check_id(const std::string& id) {
  if (!std::regex_match(id, kIdPattern)) throw NotFound("no such id '" + id + "'");
}

}  // namespace

SessionService::SessionService(Store& store, const Catalog& catalog, Options options, const TemplatePack& pack)
    : store_(store), catalog_(catalog), pack_(pack), options_(options) {
  recover_sessions();
  if (!options_.resume_runs) return;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(store_.runs_dir(), ec)) {
    if (!fs::exists(entry.path() / "run.json")) continue;
    const auto id = entry.path().filename().string();
    try {
      const auto status = read_run_status(entry.path());
      if (status.state == "complete") continue;
      launch_run(id, status.config, parse_batch(read_file(entry.path() / "setups.jsonl")));
    } catch (const Error& e) {
      recovery_errors_.emplace_back("run " + id, e.what());
    }
  }
}

SessionService::~SessionService() {
  stopping_ = true;
  std::lock_guard lock(mu_);
  for (auto& [id, task] : runs_) {
    if (task->thread.joinable()) task->thread.join();
  }
}

void SessionService::recover_sessions() {
  std::error_code ec;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(store_.sessions_dir(), ec)) {
    if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    const auto id = path.stem().string();
    try {
      Transcript t;
      auto writer = TranscriptWriter::reopen(path, &t);
      const auto setup = store_.find_setup(t.header.setup_id);
      if (!setup) throw NotFound("setup " + t.header.setup_id + " is not in the store");
      auto session = GameSession::restore(*setup, catalog_, t, pack_);
      auto [kind, name] = split_participant(t.header.agent);
      sessions_.emplace(id, std::make_shared<Live>(std::move(session), path, std::move(writer), kind, name));
    } catch (const Error& e) {
      recovery_errors_.emplace_back("session " + id, e.what());
    }
  }
}

json SessionService::health() const {
  std::lock_guard lock(mu_);
  std::size_t active = 0;
  for (const auto& [id, task] : runs_) active += task->done ? 0 : 1;
  return {{"status", "ok"},
          {"catalog", catalog_.fingerprint()},
          {"templates", pack_.checksum()},
          {"sessions", sessions_.size()},
          {"active_runs", active}};
}

// ---- setups

json SessionService::list_setups(const std::optional<std::string>& batch) const {
  std::vector<std::string> batches;
  if (batch) {
    check_id(*batch);
    batches.push_back(*batch);
  } else {
    batches = store_.list_batches();
  }
  json out = json::array();
  for (const auto& b : batches) {
    for (const auto& s : store_.load_batch(b)) {
      out.push_back({{"id", s.id},
                     {"batch", b},
                     {"mode", mode_name(s.mode)},
                     {"difficulty", difficulty_name(s.difficulty)},
                     {"verifiers", s.slots()}});
    }
  }
  return {{"setups", out}};
}

json SessionService::get_setup(const std::string& id) const {
  check_id(id);
  const auto s = store_.find_setup(id);
  if (!s) throw NotFound("no setup '" + id + "'");
  return public_view_json(public_view(*s));
}

json SessionService::generate_setups(const json& request) {
  const auto mode = parse_mode(get_string(request, "mode"));
  if (!mode) throw ConfigError("mode must be \"classic\" or \"nightmare\"");
  const auto per = request.value("per_difficulty", json(1));
  if (!per.is_number_integer() || per.get<long>() < 1 || per.get<long>() > 1000) {
    throw ConfigError("per_difficulty must be an integer in [1, 1000]");
  }
  const auto seed = get_seed(request.value("seed", json(0)));
  const auto setups = generate_batch(*mode, per.get<std::size_t>(), seed, catalog_);
  const auto id = store_.put_batch(setups);
  json ids = json::array();
  for (const auto& s : setups) ids.push_back(s.id);
  return {{"batch", id}, {"count", setups.size()}, {"setups", ids}};
}

// ---- sessions

std::shared_ptr<SessionService::Live> SessionService::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("no session '" + id + "'");
  return it->second;
}

json SessionService::prompt_json(const std::string& id, const Live& live) const {
  const auto& s = live.session;
  return {{"session_id", id},
          {"step", s.prompt_step()},
          {"text", s.prompt()},
          {"phase", phase_name(s.state().phase)},
          {"round", s.state().round},
          {"queries_left", kQueriesPerRound - s.state().queries_this_round},
          {"finished", s.finished()},
          {"seq", s.transcript().events.back().seq}};
}

json SessionService::state_json(const std::string& id, const Live& live) const {
  const auto& s = live.session;
  const auto& st = s.state();
  const auto& events = s.transcript().events;
  json history = json::array();
  for (const auto& f : st.history) {
    history.push_back({{"round", f.round}, {"verifier", f.verifier}, {"result", f.pass ? "PASS" : "FAIL"}});
  }
  json j = {{"session_id", id},
            {"setup_id", s.view().id},
            {"mode", mode_name(s.view().mode)},
            {"difficulty", difficulty_name(s.view().difficulty)},
            {"verifiers", s.verifiers()},
            {"strategy", strategy_name(s.strategy())},
            {"participant", {{"kind", live.kind}, {"name", live.name}}},
            {"phase", phase_name(st.phase)},
            {"round", st.round},
            {"proposal", st.proposal ? json(to_string(*st.proposal)) : json()},
            {"queries_left", kQueriesPerRound - st.queries_this_round},
            {"history", history},
            {"retry_streak", s.ledger().consecutive()},
            {"status", status_name(st.status)},
            {"reason", end_reason_name(st.reason)},
            {"finished", s.finished()},
            {"created", events.front().seq},
            {"updated", events.back().seq},
            {"seq", events.back().seq}};
  if (s.finished()) {
    j["submitted"] = st.submitted ? json(to_string(*st.submitted)) : json();
    j["answer"] = to_string(*s.revealed_secret());
  }
  return j;
}

json SessionService::create_session(const json& request) {
  if (!request.is_object()) throw ConfigError("request must be an object");
  const auto setup_id = get_string(request, "setup_id");
  const auto strategy = parse_strategy(request.value("strategy", std::string("oa")));
  if (!strategy) throw ConfigError("strategy must be \"oa\" or \"cot\"");
  const auto participant = request.value("participant", json::object());
  if (!participant.is_object()) throw ConfigError("participant must be an object");
  const auto kind = participant.value("kind", std::string());
  const auto name = participant.value("name", std::string());
  if (kind != "human" && kind != "agent") throw ConfigError("participant kind must be \"human\" or \"agent\"");
  if (!std::regex_match(name, kNamePattern)) throw ConfigError("participant name must match [A-Za-z0-9._@-]{1,64}");
  check_id(setup_id);
  const auto setup = store_.find_setup(setup_id);
  if (!setup) throw NotFound("no setup '" + setup_id + "'");

  GameSession session(*setup, catalog_, *strategy, kind + ":" + name, {{"kind", kind}, {"name", name}},
                      random_u64(), pack_);
  std::string id;
  fs::path path;
  {
    std::lock_guard lock(mu_);
    do {
      id = "s" + hex64(random_u64());
    } while (sessions_.count(id));
    path = store_.sessions_dir() / (id + ".jsonl");
  }
  auto writer = TranscriptWriter::create(path, session.transcript().header);
  writer.commit(session.transcript().events);
  auto live = std::make_shared<Live>(std::move(session), path, std::move(writer), kind, name);
  auto out = state_json(id, *live);
  out["prompt"] = prompt_json(id, *live);
  std::lock_guard lock(mu_);
  sessions_.emplace(id, std::move(live));
  return out;
}

json SessionService::list_sessions() const {
  std::vector<std::pair<std::string, std::shared_ptr<Live>>> all;
  {
    std::lock_guard lock(mu_);
    all.assign(sessions_.begin(), sessions_.end());
  }
  json out = json::array();
  for (const auto& [id, live] : all) {
    std::lock_guard lock(live->mu);
    const auto& s = live->session;
    out.push_back({{"session_id", id},
                   {"setup_id", s.view().id},
                   {"participant", {{"kind", live->kind}, {"name", live->name}}},
                   {"status", status_name(s.state().status)},
                   {"finished", s.finished()},
                   {"updated", s.transcript().events.back().seq}});
  }
  return {{"sessions", out}};
}

json SessionService::get_session(const std::string& id) const {
  const auto live = find(id);
  std::lock_guard lock(live->mu);
  return state_json(id, *live);
}

json SessionService::get_prompt(const std::string& id) const {
  const auto live = find(id);
  std::lock_guard lock(live->mu);
  return prompt_json(id, *live);
}

json SessionService::post_action(const std::string& id, const json& request) {
  const auto live = find(id);
  std::unique_lock lock(live->mu, std::try_to_lock);
  if (!lock.owns_lock()) throw Conflict("another action on session " + id + " is in progress");
  if (!request.is_object()) throw ConfigError("request must be an object");
  const auto response = get_string(request, "response");
  std::optional<std::string> note;
  if (request.contains("note") && !request["note"].is_null()) {
    note = get_string(request, "note");
    if (note->empty()) note.reset();
  }
  const auto current = live->session.transcript().events.back().seq;
  if (request.contains("seq")) {
    const auto& seq = request["seq"];
    if (!seq.is_number_unsigned()) throw ConfigError("\"seq\" must be a non-negative integer");
    if (seq.get<std::uint64_t>() != current) {
      throw Conflict("stale seq " + std::to_string(seq.get<std::uint64_t>()) + "; session is at " +
                     std::to_string(current));
    }
  }
  if (live->session.finished()) throw SessionFinished("session " + id + " is finished");

  if (!live->writer) live->writer = TranscriptWriter::reopen(live->path);
  // Work on a copy: if the commit fails the live session is untouched.
  GameSession next = live->session;
  auto step = next.post(response, {}, note);
  try {
    live->writer->commit(step.events);
  } catch (...) {
    live->writer.reset();
    throw;
  }
  live->session = std::move(next);

  json out;
  out["accepted"] = step.accepted;
  out["feedback"] = nullptr;
  out["retry"] = nullptr;
  json events = json::array();
  for (const auto& e : step.events) {
    events.push_back(event_to_json(e));
    if (const auto* f = std::get_if<FeedbackEvent>(&e.body)) {
      out["feedback"] = {{"round", f->feedback.round},
                         {"verifier", f->feedback.verifier},
                         {"result", f->feedback.pass ? "PASS" : "FAIL"}};
    } else if (const auto* r = std::get_if<RetryEvent>(&e.body)) {
      out["retry"] = {{"error", r->error}, {"detail", r->detail}, {"consecutive", r->consecutive},
                      {"give_up", r->give_up}};
    }
  }
  out["events"] = events;
  out["prompt"] = prompt_json(id, *live);
  out["state"] = state_json(id, *live);
  return out;
}

json SessionService::get_transcript(const std::string& id) const {
  const auto live = find(id);
  std::lock_guard lock(live->mu);
  const auto& t = live->session.transcript();
  json events = json::array();
  for (const auto& e : t.events) events.push_back(event_to_json(e));
  return {{"session_id", id}, {"header", header_to_json(t.header)}, {"events", events}};
}

// ---- runs

json SessionService::start_run(const json& request) {
  if (!request.is_object()) throw ConfigError("request must be an object");
  auto doc = request;
  doc["templates"] = pack_.checksum();
  doc["catalog"] = catalog_.fingerprint();
  if (!doc.contains("seed")) doc["seed"] = 0;
  const auto config = RunConfig::from_json(doc);
  check_id(config.batch);
  auto setups = store_.load_batch(config.batch);

  auto identity = config.to_json();
  identity.erase("parallelism");
  const auto text = identity.dump();
  const auto id = "r" + hex32(crc32(text)) + hex32(crc32(text, 0x9e3779b9u));
  const bool started = [&] {
    std::lock_guard lock(mu_);
    const auto it = runs_.find(id);
    return it == runs_.end() || it->second->done;
  }();
  if (started) launch_run(id, config, std::move(setups));
  auto out = get_run(id);
  out["started"] = started;
  return out;
}

void SessionService::launch_run(const std::string& id, const RunConfig& config, std::vector<GameSetup> setups) {
  auto factory = make_agent_factory(config.agent, config.agent_config, catalog_);  // ConfigError before any thread
  std::lock_guard lock(mu_);
  auto& slot = runs_[id];
  if (slot) {
    if (!slot->done) return;
    if (slot->thread.joinable()) slot->thread.join();
  }
  slot = std::make_unique<RunTask>();
  auto* task = slot.get();
  const auto dir = store_.runs_dir() / id;
  task->thread = std::thread([this, task, dir, config, setups = std::move(setups), factory = std::move(factory)] {
    try {
      RunHooks hooks;
      hooks.interrupted = [this] { return stopping_.load(); };
      run_benchmark(dir, config, setups, catalog_, factory, hooks, pack_);
    } catch (const std::exception& e) {
      task->error = e.what();
    }
    task->done = true;
  });
}

json SessionService::list_runs() const {
  json out = json::array();
  std::error_code ec;
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(store_.runs_dir(), ec)) {
    if (entry.is_directory()) ids.push_back(entry.path().filename().string());
  }
  std::sort(ids.begin(), ids.end());
  for (const auto& id : ids) {
    try {
      auto j = get_run(id);
      j.erase("metrics");
      out.push_back(std::move(j));
    } catch (const NotFound&) {
    }
  }
  return {{"runs", out}};
}

json SessionService::get_run(const std::string& id) const {
  check_id(id);
  const auto dir = store_.runs_dir() / id;
  bool active = false;
  std::string error;
  bool known = false;
  {
    std::lock_guard lock(mu_);
    if (const auto it = runs_.find(id); it != runs_.end()) {
      known = true;
      active = !it->second->done;
      if (it->second->done) error = it->second->error;
    }
  }
  json out;
  if (fs::exists(dir / "run.json")) {
    out = read_run_status(dir).to_json();
    if (fs::exists(dir / "metrics.json")) out["metrics"] = json::parse(read_file(dir / "metrics.json"));
  } else if (known) {
    out = {{"id", id}, {"state", "starting"}};
  } else {
    throw NotFound("no run '" + id + "'");
  }
  out["active"] = active;
  if (!error.empty()) out["error"] = error;
  return out;
}

void SessionService::wait_run(const std::string& id) {
  RunTask* task = nullptr;
  {
    std::lock_guard lock(mu_);
    const auto it = runs_.find(id);
    if (it == runs_.end()) throw NotFound("no run '" + id + "' in this process");
    task = it->second.get();
  }
  while (!task->done) std::this_thread::sleep_for(std::chrono::milliseconds(5));
}

}  // namespace vericode
