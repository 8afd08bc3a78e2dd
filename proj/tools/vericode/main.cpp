// vericode: generate, run, eval, report, replay, serve.
//
// Exit codes: 0 ok, 1 check failed (replay divergence), 2 invalid input or
// configuration, 3 filesystem, 4 infrastructure (endpoint unreachable or
// games forfeited for infra), 5 setup generation exhausted, 70 internal.

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include "vericode/analytics/export.hpp"
#include "vericode/engine/replay.hpp"
#include "vericode/eval/audit.hpp"
#include "vericode/eval/judge.hpp"
#include "vericode/service/http_server.hpp"
#include "vericode/service/runner.hpp"
#include "vericode/setup/generator.hpp"
#include "vericode/util/checksum.hpp"
#include "vericode/util/fs.hpp"

using namespace vericode;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit : int { kOk = 0, kCheckFailed = 1, kInvalid = 2, kIo = 3, kInfra = 4, kGeneration = 5, kInternal = 70 };

struct Options {
  // generate
  std::string mode = "classic";
  std::size_t per_difficulty = 90;
  std::string seed = "0";
  std::string out;
  // run
  std::string batch;
  std::string agent = "oracle";
  std::string agent_config;
  std::string strategy = "oa";
  int parallelism = 1;
  std::string model;
  std::string endpoint;
  std::string credential_env;
  // eval / report
  std::string run_dir;
  std::string judge = "deterministic";
  std::string extractor = "pattern";
  bool cross_check = false;
  double audit = 0;
  std::string judgments;
  std::string format = "csv";
  // replay
  std::vector<std::string> paths;
  std::string setups;
  // serve
  std::string data_dir = "vericode-data";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string token_env = "VERICODE_SERVICE_TOKEN";
  bool no_resume = false;
};

std::uint64_t parse_seed(const std::string& text) {
  if (text.size() == 16) {
    if (const auto v = parse_hex64(text)) return *v;
  }
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used, 0);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("seed must be a number or 16 hex digits, got '" + text + "'");
}

// Printed as a config file for the active verb, so it can be fed back via --config.
void print_effective(const CLI::App& verb) {
  std::cerr << "# effective config\n[" << verb.get_name() << "]\n"
            << verb.config_to_str(true, false) << "# version = \"" VERICODE_VERSION "\"\n"
            << "# catalog = \"" << default_catalog().fingerprint() << "\"\n"
            << "# templates = \"" << TemplatePack::builtin().checksum() << "\"\n\n";
}

void check_writable_parent(const fs::path& path) {
  const auto parent = fs::absolute(path).parent_path();
  if (!fs::is_directory(parent)) throw IoError(parent.string() + " is not a directory");
  if (fs::is_directory(path)) throw IoError(path.string() + " is a directory");
}

// ---- generate

int cmd_generate(const Options& o) {
  const auto mode = parse_mode(o.mode);
  if (!mode) throw ConfigError("--mode must be classic or nightmare");
  if (o.per_difficulty < 1) throw ConfigError("--per-difficulty must be at least 1");
  const auto seed = parse_seed(o.seed);
  check_writable_parent(o.out);

  const auto& catalog = default_catalog();
  const auto setups = generate_batch(*mode, o.per_difficulty, seed, catalog);
  std::size_t unique = 0, necessary = 0;
  for (const auto& s : setups) {
    std::vector<CodeSet> ext;
    for (std::size_t i = 0; i < s.slots(); ++i) ext.push_back(active_criterion(s, catalog, i).extension);
    const auto check = check_extensions(ext);
    unique += check.violation != SetupCheck::Violation::kUniqueness;
    necessary += check.valid();
  }
  write_batch(o.out, setups);
  std::cout << "setups: " << setups.size() << "\n"
            << "uniqueness: " << unique << "/" << setups.size() << " pass\n"
            << "necessity: " << necessary << "/" << setups.size() << " pass\n"
            << "batch: " << Store::batch_id(serialize_batch(setups)) << "\n"
            << "written: " << o.out << "\n";
  return unique == setups.size() && necessary == setups.size() ? kOk : kCheckFailed;
}

// ---- run

json agent_config_of(const Options& o) {
  json cfg = json::object();
  if (!o.agent_config.empty()) {
    try {
      cfg = fs::exists(o.agent_config) ? json::parse(read_file(o.agent_config)) : json::parse(o.agent_config);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("--agent-config is neither a JSON file nor JSON: ") + e.what());
    }
  }
  if (!o.model.empty()) cfg["model"] = o.model;
  if (!o.endpoint.empty()) cfg["endpoint"] = o.endpoint;
  if (!o.credential_env.empty()) cfg["credential_env"] = o.credential_env;
  return cfg;
}

int cmd_run(const Options& o) {
  const auto strategy = parse_strategy(o.strategy);
  if (!strategy) throw ConfigError("--strategy must be oa or cot");
  if (o.parallelism < 1) throw ConfigError("--parallelism must be at least 1");
  const auto& catalog = default_catalog();
  RunConfig cfg;
  cfg.agent = o.agent;
  cfg.agent_config = agent_config_of(o);
  cfg.strategy = *strategy;
  cfg.parallelism = o.parallelism;
  cfg.seed = parse_seed(o.seed);
  const auto factory = make_agent_factory(cfg.agent, cfg.agent_config, catalog);
  const auto text = read_file(o.batch);
  const auto setups = parse_batch(text);
  for (const auto& s : setups) validate_setup(s, catalog);
  cfg.batch = Store::batch_id(serialize_batch(setups));

  std::mutex out_mu;
  std::size_t n = 0;
  RunHooks hooks;
  hooks.on_game = [&](const GameSummary& g) {
    std::lock_guard lock(out_mu);
    std::cerr << "[" << ++n << "] " << g.game << " " << status_name(g.status) << " rounds=" << g.rounds << "\n";
  };
  const auto r = run_benchmark(o.out, cfg, setups, catalog, factory, hooks);
  std::cout << export_metrics(r.metrics, parse_export_format(o.format));
  std::cout << "run: " << o.out << " (" << r.status.finished << "/" << r.status.games << " games";
  if (r.restarted) std::cout << ", " << r.restarted << " restarted";
  std::cout << ")\n";

  std::size_t infra = 0;
  for (const auto& g : read_run_index(o.out)) infra += g.reason == EndReason::kInfra;
  if (infra) {
    std::cerr << "warning: " << infra << " game(s) forfeited because the agent endpoint failed\n";
    return kInfra;
  }
  return kOk;
}

// ---- eval

std::shared_ptr<CompletionClient> external_client(const Options& o) {
  if (o.model.empty()) throw ConfigError("--model is required for an external judge or extractor");
  json cfg = {{"model", o.model}};
  if (!o.endpoint.empty()) cfg["endpoint"] = o.endpoint;
  if (!o.credential_env.empty()) cfg["credential_env"] = o.credential_env;
  cfg["temperature"] = 0;
  return std::make_shared<HttpCompletionClient>(CompletionConfig::from_json(cfg));
}

int cmd_eval(const Options& o) {
  if (o.judge != "deterministic" && o.judge != "external") throw ConfigError("--judge must be deterministic or external");
  if (o.extractor != "pattern" && o.extractor != "external") throw ConfigError("--extractor must be pattern or external");
  if (o.audit < 0 || o.audit > 1) throw ConfigError("--audit must be a fraction in [0, 1]");
  const auto& catalog = default_catalog();
  const fs::path dir = o.run_dir;
  const auto status = read_run_status(dir);
  const auto out = o.judgments.empty() ? dir / "judgments.jsonl" : fs::path(o.judgments);
  check_writable_parent(out);

  std::shared_ptr<CompletionClient> client;
  if (o.judge == "external" || o.extractor == "external") client = external_client(o);  // credential checked here
  JudgeOptions jopt;
  if (o.judge == "external") {
    jopt.external = std::make_shared<ExternalJudge>(client, o.model);
    jopt.cross_check = o.cross_check;
  }
  std::optional<ExternalExtractor> extractor;
  if (o.extractor == "external") extractor.emplace(client, o.model, catalog);

  const auto setups = parse_batch(read_file(dir / "setups.jsonl"));
  const auto index = read_run_index(dir);
  std::vector<Judgment> all;
  std::vector<ExchangeLog> log;
  for (const auto& setup : setups) {
    const auto path = transcript_path(dir, setup.id);
    if (!fs::exists(path)) continue;
    const auto t = read_transcript(path);
    if (t.outcome() == nullptr) continue;
    const auto claims = extractor ? extractor->extract(t, public_view(setup), &log) : extract_pattern(t);
    auto judged = judge_game(claims, setup, catalog, jopt, &log);
    all.insert(all.end(), judged.begin(), judged.end());
  }
  write_judgments(out, all);
  if (!log.empty()) {
    std::string lines;
    for (const auto& e : log) lines += json{{"request", e.request}, {"reply", e.reply}, {"error", e.error}}.dump() + "\n";
    write_file_atomic(fs::path(out).replace_extension(".log.jsonl"), lines);
  }

  if (status.config.strategy == Strategy::kAnswerOnly) {
    std::cerr << "warning: answer-only run; transcripts hold no reasoning to judge\n";
  }
  std::array<std::size_t, 4> counts{};
  std::size_t flagged = 0;
  for (const auto& j : all) {
    ++counts[static_cast<std::size_t>(j.category)];
    flagged += j.flagged;
  }
  std::cout << "judgments: " << all.size() << "\n";
  for (const auto c : {Category::kCorrect, Category::kIncorrect, Category::kInclude, Category::kUnresolved}) {
    std::cout << category_name(c) << ": " << counts[static_cast<std::size_t>(c)] << "\n";
  }
  std::cout << "flagged: " << flagged << "\nwritten: " << out.string() << "\n";

  if (o.audit > 0 && !index.empty()) {
    const auto sample = sample_audit(index, o.audit, parse_seed(o.seed));
    const auto audit_path = dir / "audit.md";
    write_file_atomic(audit_path, audit_checklist(sample));
    std::cout << "audit: " << sample.items.size() << " games -> " << audit_path.string() << "\n";
  }
  return kOk;
}

// ---- report

int cmd_report(const Options& o) {
  const auto format = parse_export_format(o.format);
  const fs::path dir = o.run_dir;
  const auto games = read_run_index(dir);
  if (games.empty() && !fs::exists(dir / "run.json")) throw IoError(dir.string() + " is not a run directory");
  const auto metrics = compute_metrics(games);
  const std::string ext = format == ExportFormat::kJson ? ".json" : format == ExportFormat::kTsv ? ".tsv" : ".csv";

  std::vector<std::pair<std::string, std::string>> sections = {{"metrics", export_metrics(metrics, format)}};
  const fs::path jpath = o.judgments.empty() ? dir / "judgments.jsonl" : fs::path(o.judgments);
  if (fs::exists(jpath)) {
    const auto judgments = read_judgments(jpath);
    const auto stats = error_paths(judgments, games);
    sections.emplace_back("table4", export_table4(stats, format));
    sections.emplace_back("flow", export_flow(stats, format));
    sections.emplace_back("persistence", export_persistence(stats, format));
  } else {
    std::cerr << "notice: no judgments at " << jpath.string()
              << "; error-path sections (table4, flow, persistence) omitted\n";
  }
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    for (const auto& [name, body] : sections) {
      const auto path = fs::path(o.out) / (name + ext);
      write_file_atomic(path, body);
      std::cout << "written: " << path.string() << "\n";
    }
  } else {
    for (const auto& [name, body] : sections) std::cout << "## " << name << "\n" << body << "\n";
  }
  return kOk;
}

// ---- replay

int cmd_replay(const Options& o) {
  const auto& catalog = default_catalog();
  std::vector<std::pair<fs::path, fs::path>> jobs;  // transcript, batch
  for (const auto& p : o.paths) {
    const fs::path path = p;
    if (fs::is_directory(path)) {
      const auto batch = o.setups.empty() ? path / "setups.jsonl" : fs::path(o.setups);
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(path / "transcripts")) files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (auto& f : files) jobs.emplace_back(std::move(f), batch);
    } else {
      jobs.emplace_back(path, o.setups.empty() ? path.parent_path().parent_path() / "setups.jsonl" : fs::path(o.setups));
    }
  }
  std::map<fs::path, std::vector<GameSetup>> batches;
  std::size_t ok = 0, bad = 0;
  for (const auto& [tpath, bpath] : jobs) {
    if (!batches.count(bpath)) batches[bpath] = read_batch(bpath);
    const auto t = read_transcript(tpath);
    const auto& b = batches[bpath];
    const auto it = std::find_if(b.begin(), b.end(), [&](const GameSetup& s) { return s.id == t.header.setup_id; });
    if (it == b.end()) throw ConfigError(tpath.string() + ": setup " + t.header.setup_id + " not in " + bpath.string());
    const auto r = replay(t, *it, catalog);
    if (r.ok) {
      ++ok;
      std::cout << "OK " << tpath.string() << "\n";
    } else {
      ++bad;
      std::cout << "DIVERGED " << tpath.string() << " at seq " << (r.divergence_seq ? *r.divergence_seq : 0) << ": "
                << r.message << "\n";
    }
  }
  std::cout << "verified: " << ok << "/" << ok + bad << "\n";
  return bad == 0 ? kOk : kCheckFailed;
}

// ---- serve

int cmd_serve(const Options& o) {
  std::string token;
  if (!o.token_env.empty()) {
    if (const char* v = std::getenv(o.token_env.c_str())) token = v;
  }
  // Signals are taken by a dedicated thread so shutdown is an ordinary stop().
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  Store store(o.data_dir);
  SessionService::Options sopt;
  sopt.resume_runs = !o.no_resume;
  SessionService service(store, default_catalog(), sopt);
  for (const auto& [what, why] : service.recovery_errors()) std::cerr << "warning: " << what << ": " << why << "\n";
  HttpServer server(service, {o.host, o.port, token});
  const int port = server.bind();
  std::cout << "listening on " << o.host << ":" << port << (token.empty() ? "" : " (token required)") << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  });
  server.serve();
  pthread_kill(waiter.native_handle(), SIGTERM);  // wake the waiter if stop came from elsewhere
  waiter.join();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vericode: deduction game benchmark toolkit"};
  app.set_config("--config", "", "TOML/INI file with the same keys as the flags");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  Options o;

  auto* gen = app.add_subcommand("generate", "Generate a batch of game setups");
  gen->add_option("--mode", o.mode, "classic or nightmare")->check(CLI::IsMember({"classic", "nightmare"}));
  gen->add_option("--per-difficulty", o.per_difficulty, "Setups per difficulty level")->check(CLI::PositiveNumber);
  gen->add_option("--seed", o.seed, "Batch seed (number or 16 hex digits)");
  gen->add_option("--out", o.out, "Output JSONL file")->required();

  auto* run = app.add_subcommand("run", "Play every setup of a batch with one agent");
  run->add_option("--batch", o.batch, "Setup batch file")->required()->check(CLI::ExistingFile);
  run->add_option("--agent", o.agent, "random, oracle or llm")->check(CLI::IsMember({"random", "oracle", "llm"}));
  run->add_option("--agent-config", o.agent_config, "Agent settings: JSON file or inline JSON");
  run->add_option("--model", o.model, "llm: model name");
  run->add_option("--endpoint", o.endpoint, "llm: chat completions base URL");
  run->add_option("--credential-env", o.credential_env, "llm: environment variable holding the API key");
  run->add_option("--strategy", o.strategy, "oa or cot")->check(CLI::IsMember({"oa", "cot"}));
  run->add_option("--parallelism", o.parallelism, "Concurrent games")->check(CLI::PositiveNumber);
  run->add_option("--seed", o.seed, "Run seed (number or 16 hex digits)");
  run->add_option("--out", o.out, "Run directory (resumed if it exists)")->required();
  run->add_option("--format", o.format, "Summary format: csv, tsv or json");

  auto* ev = app.add_subcommand("eval", "Judge the reasoning in a run's transcripts");
  ev->add_option("--run", o.run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--judge", o.judge, "deterministic or external");
  ev->add_option("--extractor", o.extractor, "pattern or external");
  ev->add_flag("--cross-check", o.cross_check, "Also ask the external judge about structured claims");
  ev->add_option("--model", o.model, "external judge/extractor model");
  ev->add_option("--endpoint", o.endpoint, "external judge endpoint");
  ev->add_option("--credential-env", o.credential_env, "environment variable holding the API key");
  ev->add_option("--out", o.judgments, "Judgments file (default <run>/judgments.jsonl)");
  ev->add_option("--audit", o.audit, "Also write a stratified audit sample of this fraction of games");
  ev->add_option("--seed", o.seed, "Audit sample seed");

  auto* rep = app.add_subcommand("report", "Metrics, error-path rates, flow and persistence tables");
  rep->add_option("--run", o.run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
  rep->add_option("--judgments", o.judgments, "Judgments file (default <run>/judgments.jsonl)");
  rep->add_option("--format", o.format, "csv, tsv or json");
  rep->add_option("--out", o.out, "Write one file per table into this directory");

  auto* rp = app.add_subcommand("replay", "Re-simulate transcripts and compare every event");
  rp->add_option("paths", o.paths, "Transcript files or run directories")->required();
  rp->add_option("--setups", o.setups, "Batch holding the setups (default: the run's setups.jsonl)");

  auto* sv = app.add_subcommand("serve", "Serve sessions and runs over HTTP");
  sv->add_option("--data", o.data_dir, "Data directory")->envname("VERICODE_DATA_DIR");
  sv->add_option("--host", o.host, "Listen address")->envname("VERICODE_HOST");
  sv->add_option("--port", o.port, "Listen port (0 = any free port)")->envname("VERICODE_PORT");
  sv->add_option("--token-env", o.token_env, "Environment variable holding the static bearer token");
  sv->add_flag("--no-resume", o.no_resume, "Do not restart unfinished runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    print_effective(*app.get_subcommands().front());
    if (gen->parsed()) return cmd_generate(o);
    if (run->parsed()) return cmd_run(o);
    if (ev->parsed()) return cmd_eval(o);
    if (rep->parsed()) return cmd_report(o);
    if (rp->parsed()) return cmd_replay(o);
    if (sv->parsed()) return cmd_serve(o);
  } catch (const InfraError& e) {
    std::cerr << "infra error: " << e.what() << "\n";
    return kInfra;
  } catch (const GenerationError& e) {
    std::cerr << "generation error: " << e.what() << "\n";
    return kGeneration;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {  // ConfigError, FormatError, NotFound
    std::cerr << "invalid: " << e.what() << "\n";
    return kInvalid;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
