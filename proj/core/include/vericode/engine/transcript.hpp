#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vericode/engine/game.hpp"
#include "vericode/protocol/strategy.hpp"

namespace vericode {

struct TranscriptHeader {
  std::string setup_id;
  Mode mode = Mode::kClassic;
  Difficulty difficulty = Difficulty::kEasy;
  Strategy strategy = Strategy::kAnswerOnly;
  std::string agent;      // "random", "oracle", "llm:<model>", "human:<name>"
  std::uint64_t seed = 0;
  std::string catalog;    // catalog fingerprint
  std::string templates;  // template pack checksum
  nlohmann::json config = nlohmann::json::object();  // agent settings, never credentials
  bool operator==(const TranscriptHeader&) const = default;
};

struct PromptEvent {
  std::string step;
  std::string text;
  bool operator==(const PromptEvent&) const = default;
};

struct ResponseEvent {
  std::string text;
  double latency_ms = 0;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  int infra_retries = 0;
  bool operator==(const ResponseEvent&) const = default;
};

/// A parsed, legal move. reasoning holds the CoT block or a human's note.
struct ActionEvent {
  Action action;
  std::optional<std::string> reasoning;
  bool operator==(const ActionEvent&) const = default;
};

struct FeedbackEvent {
  Feedback feedback;
  bool operator==(const FeedbackEvent&) const = default;
};

struct RetryEvent {
  std::string step;
  std::string error;  // "format", "missing_reasoning", "invalid_verifier"
  std::string detail;
  int consecutive = 0;
  bool give_up = false;
  bool operator==(const RetryEvent&) const = default;
};

struct InfraEvent {
  std::string message;
  int attempt = 0;
  bool operator==(const InfraEvent&) const = default;
};

struct OutcomeEvent {
  Status status = Status::kInProgress;
  EndReason reason = EndReason::kNone;
  std::optional<Code> submitted;
  int rounds = 0;
  int queries = 0;
  bool operator==(const OutcomeEvent&) const = default;
};

using EventBody = std::variant<PromptEvent, ResponseEvent, ActionEvent, FeedbackEvent, RetryEvent,
                               InfraEvent, OutcomeEvent>;

struct Event {
  std::uint64_t seq = 0;  // logical clock, 1-based, gap-free
  int round = 0;
  std::string wall;       // UTC annotation; ignored by comparisons
  EventBody body;

  bool operator==(const Event& o) const { return seq == o.seq && round == o.round && body == o.body; }
};

struct Transcript {
  TranscriptHeader header;
  std::vector<Event> events;

  const OutcomeEvent* outcome() const;
  std::uint64_t next_seq() const { return events.empty() ? 1 : events.back().seq + 1; }
  bool operator==(const Transcript&) const = default;
};

std::string_view event_type(const EventBody& body);
std::string utc_now();

nlohmann::json header_to_json(const TranscriptHeader& header);
TranscriptHeader header_from_json(const nlohmann::json& j);
nlohmann::json event_to_json(const Event& event);
Event event_from_json(const nlohmann::json& j);
nlohmann::json action_to_json(const Action& action);
Action action_from_json(const nlohmann::json& j);

// On disk a transcript is one JSON record per line: the header, then events.
// Every line ends with "crc", the crc32 of the line's text before that field,
// seeded with the previous line's crc, so edits and reordering break the
// chain. Events are appended in groups, each closed by a commit record; a
// group without its commit was never acknowledged.

struct TranscriptFileInfo {
  std::size_t lines = 0;      // valid lines, including header and commits
  std::uint32_t crc = 0;      // crc of the last valid line
  std::uintmax_t bytes = 0;   // length of the valid prefix
  bool recovered = false;     // true if a damaged or uncommitted tail was dropped
};

/// Strict load: any damage or an uncommitted tail is a FormatError.
Transcript read_transcript(const std::filesystem::path& path, TranscriptFileInfo* info = nullptr);
/// Crash-recovery load: keeps the longest committed, checksum-valid prefix.
Transcript recover_transcript(const std::filesystem::path& path, TranscriptFileInfo* info = nullptr);

std::string serialize_transcript(const Transcript& transcript);
Transcript parse_transcript(std::string_view text, TranscriptFileInfo* info = nullptr);

class TranscriptWriter {
 public:
  /// Creates a new file holding just the header. Fails if the file exists.
  static TranscriptWriter create(const std::filesystem::path& path, const TranscriptHeader& header);
  /// Reopens after a crash; truncates the file to its committed prefix.
  static TranscriptWriter reopen(const std::filesystem::path& path, Transcript* recovered = nullptr);

  /// Appends events plus a commit record in a single write, then flushes and
  /// syncs. Once this returns the group is durable.
  void commit(std::span<const Event> events);

  const TranscriptFileInfo& info() const { return info_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  TranscriptWriter(std::filesystem::path path, TranscriptFileInfo info);
  void write_durably(const std::string& chunk);

  std::filesystem::path path_;
  TranscriptFileInfo info_;
  std::uint64_t last_seq_ = 0;
};

}  // namespace vericode
