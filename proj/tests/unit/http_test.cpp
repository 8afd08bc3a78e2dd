#include <doctest.h>
#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include "vericode/agents/baseline_agents.hpp"
#include "vericode/engine/replay.hpp"
#include "vericode/service/http_server.hpp"
#include "vericode/setup/generator.hpp"
#include "vericode/util/fs.hpp"

using namespace vericode;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// A service plus server on a free port; destroying it is the "kill".
struct Running {
  Store store;
  SessionService service;
  HttpServer server;
  int port;
  std::thread thread;

  Running(const fs::path& root, std::string token = "")
      : store(root), service(store, default_catalog()), server(service, {"127.0.0.1", 0, std::move(token)}),
        port(server.bind()), thread([this] { server.serve(); }) {}
  ~Running() {
    server.stop();
    thread.join();
  }
};

struct Client {
  httplib::Client http;
  std::vector<std::string> bodies;  // everything the server said
  httplib::Headers headers;

  explicit Client(int port, std::string token = "") : http("127.0.0.1", port) {
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
  }
  std::pair<int, json> get(const std::string& path) {
    auto r = http.Get(path, headers);
    REQUIRE(r);
    bodies.push_back(r->body);
    return {r->status, json::parse(r->body)};
  }
  std::pair<int, json> post(const std::string& path, const json& body) {
    auto r = http.Post(path, headers, body.dump(), "application/json");
    REQUIRE(r);
    bodies.push_back(r->body);
    return {r->status, json::parse(r->body)};
  }
};

// Any key that would leak hidden setup data.
bool leaks(const json& j) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (k == "secret" || k == "active" || k == "permutation" || k == "answer") return true;
      if (leaks(v)) return true;
    }
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (leaks(v)) return true;
    }
  }
  return false;
}

std::vector<GameSetup> nightmare_batch() { return generate_batch(Mode::kNightmare, 1, 5, default_catalog()); }

}  // namespace

TEST_CASE("scripted game over HTTP: exact prompts, no leaks, survives restart") {
  TempDir tmp("vericode_http_test");
  const auto setups = nightmare_batch();
  const auto& setup = setups[1];  // medium
  std::string session;
  std::size_t acknowledged = 0;
  OracleAgent agent(default_catalog());
  Strategy strategy = Strategy::kChainOfThought;

  {
    Running srv(tmp.path);
    Client c(srv.port);
    auto [st, gen] = c.post("/v1/setups", {{"mode", "nightmare"}, {"per_difficulty", 1}, {"seed", 5}});
    REQUIRE(st == 201);
    CHECK(gen["count"] == 3);
    CHECK(gen["setups"][1] == setup.id);

    auto [vs, view] = c.get("/v1/setups/" + setup.id);
    REQUIRE(vs == 200);
    agent.reset(public_view_from_json(view), strategy);

    auto [cs, created] = c.post("/v1/sessions", {{"setup_id", setup.id},
                                                  {"strategy", "cot"},
                                                  {"participant", {{"kind", "agent"}, {"name", "oracle"}}}});
    REQUIRE(cs == 201);
    session = created["session_id"];
    CHECK(created["prompt"]["text"].get<std::string>().find("You are now entering the **Proposal Stage**") !=
          std::string::npos);

    // Idempotent prompt reads.
    auto [p1s, p1] = c.get("/v1/sessions/" + session + "/prompt");
    auto [p2s, p2] = c.get("/v1/sessions/" + session + "/prompt");
    CHECK(p1 == p2);

    // Malformed input goes down the retry path, not the engine; the retry
    // prompt then asks the agent to repeat its (unsent) first answer.
    agent.respond(p1["text"]);
    auto [gs, garbage] = c.post("/v1/sessions/" + session + "/actions", {{"response", "no idea"}});
    CHECK(gs == 200);
    CHECK_FALSE(garbage["accepted"].get<bool>());
    CHECK(garbage["retry"]["consecutive"] == 1);
    CHECK(garbage["state"]["retry_streak"] == 1);
    ++acknowledged;

    // Play a few actions, then "crash".
    for (int i = 0; i < 4; ++i) {
      auto [ps, prompt] = c.get("/v1/sessions/" + session + "/prompt");
      const auto reply = agent.respond(prompt["text"]);
      auto [as, acted] = c.post("/v1/sessions/" + session + "/actions",
                                {{"response", reply.text}, {"seq", prompt["seq"]}});
      REQUIRE(as == 200);
      CHECK(acted["accepted"].get<bool>());
      if (acted["prompt"]["step"] == "question_following") {
        CHECK(acted["feedback"]["result"].is_string());
      }
      ++acknowledged;
    }
    for (const auto& b : c.bodies) CHECK_FALSE(leaks(json::parse(b)));
  }

  // A torn write after the last acknowledged action.
  {
    std::ofstream out(tmp.path / "sessions" / (session + ".jsonl"), std::ios::app | std::ios::binary);
    out << "{\"seq\":999,\"type\":\"resp";
  }

  Running srv(tmp.path);
  CHECK(srv.service.recovery_errors().empty());
  Client c(srv.port);
  {
    auto [ts, t] = c.get("/v1/sessions/" + session + "/transcript");
    REQUIRE(ts == 200);
    std::size_t responses = 0;
    for (const auto& e : t["events"]) responses += e["type"] == "response";
    CHECK(responses == acknowledged);  // nothing lost, nothing duplicated
  }

  bool finished = false;
  for (int guard = 0; guard < 500 && !finished; ++guard) {
    auto [ps, prompt] = c.get("/v1/sessions/" + session + "/prompt");
    const auto reply = agent.respond(prompt["text"]);
    auto [as, acted] =
        c.post("/v1/sessions/" + session + "/actions", {{"response", reply.text}, {"seq", prompt["seq"]}});
    REQUIRE(as == 200);
    finished = acted["state"]["finished"];
    if (!finished) CHECK_FALSE(leaks(acted));
  }
  REQUIRE(finished);
  for (std::size_t i = 0; i + 1 < c.bodies.size(); ++i) CHECK_FALSE(leaks(json::parse(c.bodies[i])));

  auto [fs_, final_state] = c.get("/v1/sessions/" + session);
  CHECK(final_state["status"] == "won");
  CHECK(final_state["answer"] == to_string(setup.secret));
  auto [fp, final_prompt] = c.get("/v1/sessions/" + session + "/prompt");
  CHECK(final_prompt["step"] == "deduce_result");
  CHECK(final_prompt["text"].get<std::string>().find("The final guess is") != std::string::npos);

  auto [late, rejected] = c.post("/v1/sessions/" + session + "/actions", {{"response", "<CHOICE>: SKIP"}});
  CHECK(late == 409);
  CHECK(rejected["error"]["code"] == "finished");

  const auto stored = read_transcript(tmp.path / "sessions" / (session + ".jsonl"));
  CHECK(stored.header.agent == "agent:oracle");
  CHECK(replay(stored, setup, default_catalog()).ok);
}

TEST_CASE("stale and concurrent actions are rejected in order") {
  TempDir tmp("vericode_http_conflict_test");
  Store store(tmp.path);
  store.put_batch(nightmare_batch());
  SessionService svc(store, default_catalog());
  const auto created = svc.create_session(
      {{"setup_id", nightmare_batch()[0].id}, {"participant", {{"kind", "human"}, {"name", "ana"}}}});
  const std::string id = created["session_id"];
  const auto seq = created["seq"].get<std::uint64_t>();

  // Eight clients answer the same prompt; exactly one wins.
  std::atomic<int> accepted{0}, conflicts{0};
  std::vector<std::thread> clients;
  for (int i = 0; i < 8; ++i) {
    clients.emplace_back([&] {
      try {
        svc.post_action(id, {{"response", "<CHOICE>: BLUE=1, YELLOW=2, PURPLE=3"}, {"seq", seq}});
        ++accepted;
      } catch (const Conflict&) {
        ++conflicts;
      }
    });
  }
  for (auto& t : clients) t.join();
  CHECK(accepted == 1);
  CHECK(conflicts == 7);
  const auto t = svc.get_transcript(id);
  std::size_t actions = 0;
  for (const auto& e : t["events"]) actions += e["type"] == "action";
  CHECK(actions == 1);

  // Human note becomes the action's reasoning.
  const auto state = svc.get_session(id);
  const auto r = svc.post_action(id, {{"response", "<CHOICE>: 1"}, {"note", "checking blue first"}, {"seq", state["seq"]}});
  CHECK(r["accepted"].get<bool>());
  bool noted = false;
  for (const auto& e : r["events"]) noted |= e.value("reasoning", json()) == "checking blue first";
  CHECK(noted);
  CHECK(r["state"]["participant"]["kind"] == "human");
}

TEST_CASE("request validation, token and runs") {
  TempDir tmp("vericode_http_misc_test");
  const auto setups = generate_batch(Mode::kClassic, 1, 3, default_catalog());
  std::string batch;
  {
    Store store(tmp.path);
    batch = store.put_batch(setups);
  }
  Running srv(tmp.path, "t0ken");
  Client anon(srv.port);
  Client c(srv.port, "t0ken");

  CHECK(anon.get("/v1/health").first == 200);
  CHECK(anon.get("/v1/sessions").first == 401);
  CHECK(c.get("/v1/sessions").first == 200);
  CHECK(c.get("/v1/nothing").first == 404);

  auto [ls, listed] = c.get("/v1/setups");
  CHECK(ls == 200);
  CHECK(listed["setups"].size() == 3);
  CHECK_FALSE(leaks(listed));

  CHECK(c.post("/v1/sessions", {{"setup_id", "classic-easy-0000000000000000"},
                                {"participant", {{"kind", "human"}, {"name", "a"}}}})
            .first == 404);
  CHECK(c.post("/v1/sessions", {{"setup_id", setups[0].id}, {"participant", {{"kind", "robot"}, {"name", "a"}}}})
            .first == 400);
  CHECK(c.post("/v1/sessions", {{"setup_id", setups[0].id}, {"participant", {{"kind", "human"}, {"name", ""}}}})
            .first == 400);
  auto r = c.http.Post("/v1/sessions", c.headers, "{not json", "application/json");
  REQUIRE(r);
  CHECK(r->status == 400);

  // Two creates, two sessions.
  const json req = {{"setup_id", setups[0].id}, {"participant", {{"kind", "human"}, {"name", "a"}}}};
  const auto a = c.post("/v1/sessions", req).second["session_id"];
  const auto b = c.post("/v1/sessions", req).second["session_id"];
  CHECK(a != b);
  CHECK(c.post("/v1/sessions/" + a.get<std::string>() + "/actions", {{"response", "x"}, {"seq", 99}}).first == 409);

  auto [rs, run] = c.post("/v1/runs", {{"batch", batch}, {"agent", "oracle"}, {"strategy", "cot"}, {"seed", 1}});
  REQUIRE(rs == 202);
  const std::string run_id = run["id"];
  srv.service.wait_run(run_id);
  auto [gs, done] = c.get("/v1/runs/" + run_id);
  CHECK(done["state"] == "complete");
  CHECK(done["finished"] == 3);
  CHECK(done["metrics"]["groups"][0]["total"]["accuracy"] == 1.0);
  CHECK(c.get("/v1/runs").second["runs"].size() == 1);
  // Same config again: same run, nothing to do.
  CHECK(c.post("/v1/runs", {{"batch", batch}, {"agent", "oracle"}, {"strategy", "cot"}, {"seed", 1}})
            .second["id"] == run_id);
  CHECK(c.post("/v1/runs", {{"batch", batch}, {"agent", "gpt"}, {"strategy", "cot"}}).first == 400);
  CHECK(c.post("/v1/runs", {{"batch", "bffffffffffffffff"}, {"agent", "oracle"}, {"strategy", "cot"}}).first == 404);
}
