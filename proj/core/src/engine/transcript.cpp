#include "vericode/engine/transcript.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <sstream>

#include "vericode/util/checksum.hpp"
#include "vericode/util/overloaded.hpp"

namespace vericode {

namespace {

using nlohmann::json;

std::uint64_t seed_from_hex(const std::string& s) {
  const auto v = parse_hex64(s);
  if (!v) throw FormatError("bad seed '" + s + "'");
  return *v;
}

Code code_field(const json& j, const char* key) {
  const auto c = parse_compact(j.at(key).get<std::string>());
  if (!c) throw FormatError(std::string("bad code in field '") + key + "'");
  return *c;
}

constexpr std::size_t kCrcSuffix = 18;  // ,"crc":"xxxxxxxx"}

std::string seal(const json& record, std::uint32_t prev, std::uint32_t* crc_out) {
  const std::string body = record.dump();
  const std::uint32_t crc = crc32(body, prev);
  *crc_out = crc;
  return body.substr(0, body.size() - 1) + ",\"crc\":\"" + hex32(crc) + "\"}\n";
}

// Returns the record if `line` (without newline) carries a valid chained crc.
std::optional<json> unseal(std::string_view line, std::uint32_t prev, std::uint32_t* crc_out) {
  if (line.size() < kCrcSuffix + 2 || line.substr(line.size() - kCrcSuffix, 8) != ",\"crc\":\"" ||
      line.substr(line.size() - 2) != "\"}") {
    return std::nullopt;
  }
  const std::string body = std::string(line.substr(0, line.size() - kCrcSuffix)) + "}";
  const auto stated = line.substr(line.size() - 10, 8);
  const std::uint32_t crc = crc32(body, prev);
  if (hex32(crc) != stated) return std::nullopt;
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  *crc_out = crc;
  return j;
}

enum class LoadMode { kStrict, kRecover };

Transcript parse_impl(std::string_view text, LoadMode mode, TranscriptFileInfo* info_out) {
  Transcript t;
  TranscriptFileInfo info;
  std::vector<Event> pending;
  std::uint32_t crc = 0;
  std::size_t offset = 0;
  std::size_t lines = 0;
  bool have_header = false;

  auto damaged = [&](const std::string& why) {
    if (mode == LoadMode::kStrict) {
      throw FormatError("transcript damaged at line " + std::to_string(lines + 1) + ": " + why);
    }
    info.recovered = true;
  };

  while (offset < text.size()) {
    const auto nl = text.find('\n', offset);
    if (nl == std::string_view::npos) {
      damaged("truncated final line");
      break;
    }
    const auto line = text.substr(offset, nl - offset);
    std::uint32_t next_crc = 0;
    auto rec = unseal(line, crc, &next_crc);
    if (!rec) {
      damaged("checksum mismatch");
      break;
    }
    bool boundary = false;  // header or commit: a committed position
    try {
      const auto type = rec->at("type").get<std::string>();
      if (!have_header) {
        if (type != "header") throw FormatError("first record is not a header");
        t.header = header_from_json(*rec);
        have_header = true;
        boundary = true;
      } else if (type == "commit") {
        if (pending.empty() || rec->at("seq").get<std::uint64_t>() != pending.back().seq) {
          throw FormatError("commit record does not close an event group");
        }
        for (auto& e : pending) t.events.push_back(std::move(e));
        pending.clear();
        boundary = true;
      } else {
        Event e = event_from_json(*rec);
        const std::uint64_t expect = pending.empty() ? t.next_seq() : pending.back().seq + 1;
        if (e.seq != expect) throw FormatError("event sequence gap");
        pending.push_back(std::move(e));
      }
    } catch (const FormatError& e) {
      if (!have_header) throw;
      damaged(e.what());
      break;
    } catch (const std::exception& e) {  // json access and conversion errors
      if (!have_header) throw FormatError(std::string("bad transcript header: ") + e.what());
      damaged(e.what());
      break;
    }
    crc = next_crc;
    ++lines;
    offset = nl + 1;
    if (boundary) {
      info.crc = crc;
      info.bytes = offset;
      info.lines = lines;
    }
  }
  if (!have_header) throw FormatError("transcript has no header");
  if (!pending.empty()) damaged("uncommitted trailing events");
  if (info_out != nullptr) *info_out = info;
  return t;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

const OutcomeEvent* Transcript::outcome() const {
  for (auto it = events.rbegin(); it != events.rend(); ++it) {
    if (const auto* o = std::get_if<OutcomeEvent>(&it->body)) return o;
  }
  return nullptr;
}

std::string_view event_type(const EventBody& body) {
  return std::visit(Overloaded{
                        [](const PromptEvent&) { return std::string_view("prompt"); },
                        [](const ResponseEvent&) { return std::string_view("response"); },
                        [](const ActionEvent&) { return std::string_view("action"); },
                        [](const FeedbackEvent&) { return std::string_view("feedback"); },
                        [](const RetryEvent&) { return std::string_view("retry"); },
                        [](const InfraEvent&) { return std::string_view("infra"); },
                        [](const OutcomeEvent&) { return std::string_view("outcome"); },
                    },
                    body);
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

json header_to_json(const TranscriptHeader& h) {
  return {{"type", "header"},
          {"format", 1},
          {"setup_id", h.setup_id},
          {"mode", mode_name(h.mode)},
          {"difficulty", difficulty_name(h.difficulty)},
          {"strategy", strategy_name(h.strategy)},
          {"agent", h.agent},
          {"seed", hex64(h.seed)},
          {"catalog", h.catalog},
          {"templates", h.templates},
          {"config", h.config}};
}

TranscriptHeader header_from_json(const json& j) {
  TranscriptHeader h;
  try {
    h.setup_id = j.at("setup_id").get<std::string>();
    const auto mode = parse_mode(j.at("mode").get<std::string>());
    const auto diff = parse_difficulty(j.at("difficulty").get<std::string>());
    const auto strat = parse_strategy(j.at("strategy").get<std::string>());
    if (!mode || !diff || !strat) throw FormatError("transcript header has unknown enum value");
    h.mode = *mode;
    h.difficulty = *diff;
    h.strategy = *strat;
    h.agent = j.at("agent").get<std::string>();
    h.seed = seed_from_hex(j.at("seed").get<std::string>());
    h.catalog = j.at("catalog").get<std::string>();
    h.templates = j.at("templates").get<std::string>();
    h.config = j.value("config", json::object());
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed transcript header: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("malformed transcript header: ") + e.what());
  }
  return h;
}

json action_to_json(const Action& a) {
  switch (a.kind) {
    case Action::Kind::kPropose: return {{"kind", "propose"}, {"code", to_compact(a.code)}};
    case Action::Kind::kQuery: return {{"kind", "query"}, {"verifier", a.verifier}};
    case Action::Kind::kSkip: return {{"kind", "skip"}};
    case Action::Kind::kSubmit: return {{"kind", "submit"}, {"code", to_compact(a.code)}};
  }
  return {};
}

Action action_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "propose") return Action::propose(code_field(j, "code"));
  if (kind == "query") return Action::query(j.at("verifier").get<int>());
  if (kind == "skip") return Action::skip();
  if (kind == "submit") return Action::submit(code_field(j, "code"));
  throw FormatError("unknown action kind '" + kind + "'");
}

json event_to_json(const Event& e) {
  json j = std::visit(
      Overloaded{
          [](const PromptEvent& p) -> json { return {{"step", p.step}, {"text", p.text}}; },
          [](const ResponseEvent& r) -> json {
            return {{"text", r.text},
                    {"latency_ms", r.latency_ms},
                    {"prompt_tokens", r.prompt_tokens},
                    {"completion_tokens", r.completion_tokens},
                    {"infra_retries", r.infra_retries}};
          },
          [](const ActionEvent& a) -> json {
            json o{{"action", action_to_json(a.action)}};
            if (a.reasoning) o["reasoning"] = *a.reasoning;
            return o;
          },
          [](const FeedbackEvent& f) -> json {
            return {{"verifier", f.feedback.verifier}, {"result", f.feedback.pass ? "PASS" : "FAIL"}};
          },
          [](const RetryEvent& r) -> json {
            return {{"step", r.step},
                    {"error", r.error},
                    {"detail", r.detail},
                    {"consecutive", r.consecutive},
                    {"give_up", r.give_up}};
          },
          [](const InfraEvent& i) -> json { return {{"message", i.message}, {"attempt", i.attempt}}; },
          [](const OutcomeEvent& o) -> json {
            json out{{"status", status_name(o.status)},
                     {"reason", end_reason_name(o.reason)},
                     {"rounds", o.rounds},
                     {"queries", o.queries}};
            if (o.submitted) out["submitted"] = to_compact(*o.submitted);
            return out;
          },
      },
      e.body);
  j["type"] = event_type(e.body);
  j["seq"] = e.seq;
  j["round"] = e.round;
  j["wall"] = e.wall;
  return j;
}

Event event_from_json(const json& j) {
  Event e;
  e.seq = j.at("seq").get<std::uint64_t>();
  e.round = j.at("round").get<int>();
  e.wall = j.value("wall", "");
  const auto type = j.at("type").get<std::string>();
  if (type == "prompt") {
    e.body = PromptEvent{j.at("step").get<std::string>(), j.at("text").get<std::string>()};
  } else if (type == "response") {
    e.body = ResponseEvent{j.at("text").get<std::string>(), j.value("latency_ms", 0.0),
                           j.value("prompt_tokens", 0), j.value("completion_tokens", 0),
                           j.value("infra_retries", 0)};
  } else if (type == "action") {
    ActionEvent a{action_from_json(j.at("action")), std::nullopt};
    if (j.contains("reasoning")) a.reasoning = j.at("reasoning").get<std::string>();
    e.body = std::move(a);
  } else if (type == "feedback") {
    const auto r = j.at("result").get<std::string>();
    if (r != "PASS" && r != "FAIL") throw FormatError("bad feedback result '" + r + "'");
    e.body = FeedbackEvent{Feedback{e.round, j.at("verifier").get<int>(), r == "PASS"}};
  } else if (type == "retry") {
    e.body = RetryEvent{j.at("step").get<std::string>(), j.at("error").get<std::string>(),
                        j.value("detail", ""), j.at("consecutive").get<int>(),
                        j.at("give_up").get<bool>()};
  } else if (type == "infra") {
    e.body = InfraEvent{j.at("message").get<std::string>(), j.value("attempt", 0)};
  } else if (type == "outcome") {
    OutcomeEvent o;
    const auto st = parse_status(j.at("status").get<std::string>());
    const auto rs = parse_end_reason(j.at("reason").get<std::string>());
    if (!st || !rs) throw FormatError("bad outcome record");
    o.status = *st;
    o.reason = *rs;
    o.rounds = j.at("rounds").get<int>();
    o.queries = j.at("queries").get<int>();
    if (j.contains("submitted")) o.submitted = code_field(j, "submitted");
    e.body = o;
  } else {
    throw FormatError("unknown event type '" + type + "'");
  }
  return e;
}

std::string serialize_transcript(const Transcript& t) {
  std::uint32_t crc = 0;
  std::string out = seal(header_to_json(t.header), 0, &crc);
  for (const auto& e : t.events) out += seal(event_to_json(e), crc, &crc);
  if (!t.events.empty()) {
    out += seal(json{{"type", "commit"}, {"seq", t.events.back().seq}}, crc, &crc);
  }
  return out;
}

Transcript parse_transcript(std::string_view text, TranscriptFileInfo* info) {
  return parse_impl(text, LoadMode::kStrict, info);
}

Transcript read_transcript(const std::filesystem::path& path, TranscriptFileInfo* info) {
  const auto text = read_file(path);
  try {
    return parse_impl(text, LoadMode::kStrict, info);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

Transcript recover_transcript(const std::filesystem::path& path, TranscriptFileInfo* info) {
  return parse_impl(read_file(path), LoadMode::kRecover, info);
}

TranscriptWriter::TranscriptWriter(std::filesystem::path path, TranscriptFileInfo info)
    : path_(std::move(path)), info_(info) {}

void TranscriptWriter::write_durably(const std::string& chunk) {
  const int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
  if (fd < 0) throw IoError("cannot open " + path_.string() + ": " + std::strerror(errno));
  std::size_t done = 0;
  while (done < chunk.size()) {
    const auto n = ::write(fd, chunk.data() + done, chunk.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string why = std::strerror(errno);
      ::close(fd);
      throw IoError("write failed for " + path_.string() + ": " + why);
    }
    done += static_cast<std::size_t>(n);
  }
  const bool synced = ::fsync(fd) == 0;
  ::close(fd);
  if (!synced) throw IoError("fsync failed for " + path_.string());
}

TranscriptWriter TranscriptWriter::create(const std::filesystem::path& path,
                                          const TranscriptHeader& header) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
  if (fd < 0) throw IoError("cannot create " + path.string() + ": " + std::strerror(errno));
  ::close(fd);
  TranscriptWriter w(path, {});
  std::uint32_t crc = 0;
  const auto line = seal(header_to_json(header), 0, &crc);
  w.write_durably(line);
  w.info_ = {1, crc, line.size(), false};
  return w;
}

TranscriptWriter TranscriptWriter::reopen(const std::filesystem::path& path, Transcript* recovered) {
  TranscriptFileInfo info;
  Transcript t = recover_transcript(path, &info);
  if (info.recovered) {
    std::error_code ec;
    std::filesystem::resize_file(path, info.bytes, ec);
    if (ec) throw IoError("cannot truncate " + path.string() + ": " + ec.message());
    info.recovered = false;
  }
  TranscriptWriter w(path, info);
  w.last_seq_ = t.events.empty() ? 0 : t.events.back().seq;
  if (recovered != nullptr) *recovered = std::move(t);
  return w;
}

void TranscriptWriter::commit(std::span<const Event> events) {
  if (events.empty()) return;
  std::string chunk;
  std::uint32_t crc = info_.crc;
  std::uint64_t seq = last_seq_;
  for (const auto& e : events) {
    if (e.seq != seq + 1) throw Error("transcript events must be appended in sequence");
    seq = e.seq;
    chunk += seal(event_to_json(e), crc, &crc);
  }
  chunk += seal(json{{"type", "commit"}, {"seq", seq}}, crc, &crc);
  write_durably(chunk);
  info_.lines += events.size() + 1;
  info_.crc = crc;
  info_.bytes += chunk.size();
  last_seq_ = seq;
}

}  // namespace vericode
