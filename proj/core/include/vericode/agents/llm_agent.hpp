#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vericode/agents/agent.hpp"

namespace vericode {

/// Settings for an OpenAI-style chat-completion endpoint. The credential is
/// referenced by environment variable name and never stored or recorded.
struct CompletionConfig {
  std::string endpoint = "https://api.openai.com/v1";  // POST <endpoint>/chat/completions
  std::string model;
  double temperature = 0.0;
  int max_tokens = 4096;
  double timeout_s = 120;
  std::string credential_env = "VERICODE_API_KEY";  // empty: send no credential
  int max_attempts = 3;                              // transport attempts per prompt
  double backoff_s = 2;                              // doubled after each failed attempt
  bool full_history = true;                          // false: send only the latest prompt
  nlohmann::json extra = nlohmann::json::object();   // merged into each request (e.g. reasoning_effort)

  nlohmann::json to_json() const;
  static CompletionConfig from_json(const nlohmann::json& j);  // throws ConfigError
};

struct ChatMessage {
  std::string role;  // "system", "user" or "assistant"
  std::string content;
};

struct Completion {
  std::string text;
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

/// One request, no retries. Throws InfraError on transport failure, timeout
/// or an error status. Implementations must allow concurrent calls.
class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  virtual Completion complete(const std::vector<ChatMessage>& messages) = 0;
};

class HttpCompletionClient : public CompletionClient {
 public:
  /// Throws ConfigError when the endpoint is malformed or the credential
  /// variable is unset.
  explicit HttpCompletionClient(CompletionConfig config);
  Completion complete(const std::vector<ChatMessage>& messages) override;

 private:
  CompletionConfig config_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
  std::string credential_;
};

/// Speaks the protocol through a completion client: every prompt becomes a
/// user message, every reply an assistant message.
class LlmAgent : public Agent {
 public:
  using Sleep = std::function<void(double seconds)>;

  LlmAgent(CompletionConfig config, std::shared_ptr<CompletionClient> client, Sleep sleep = {});

  std::string name() const override { return "llm:" + config_.model; }
  nlohmann::json config() const override { return config_.to_json(); }
  void reset(const PublicSetupView& view, Strategy strategy) override;
  /// Retries transport failures up to max_attempts; then throws InfraError
  /// carrying the number of attempts.
  AgentReply respond(const std::string& prompt) override;

  const std::vector<ChatMessage>& dialogue() const { return dialogue_; }

 private:
  CompletionConfig config_;
  std::shared_ptr<CompletionClient> client_;
  Sleep sleep_;
  std::vector<ChatMessage> dialogue_;
};

}  // namespace vericode
