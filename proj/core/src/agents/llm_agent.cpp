#include "vericode/agents/llm_agent.hpp"

#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <regex>
#include <thread>

namespace vericode {

nlohmann::json CompletionConfig::to_json() const {
  return {{"endpoint", endpoint},       {"model", model},
          {"temperature", temperature}, {"max_tokens", max_tokens},
          {"timeout_s", timeout_s},     {"credential_env", credential_env},
          {"max_attempts", max_attempts}, {"backoff_s", backoff_s},
          {"history", full_history ? "full" : "latest"}, {"extra", extra}};
}

CompletionConfig CompletionConfig::from_json(const nlohmann::json& j) {
  CompletionConfig c;
  try {
    if (!j.is_object()) throw ConfigError("completion config must be an object");
    for (const auto& [key, value] : j.items()) {
      if (key == "endpoint") c.endpoint = value.get<std::string>();
      else if (key == "model") c.model = value.get<std::string>();
      else if (key == "temperature") c.temperature = value.get<double>();
      else if (key == "max_tokens") c.max_tokens = value.get<int>();
      else if (key == "timeout_s") c.timeout_s = value.get<double>();
      else if (key == "credential_env") c.credential_env = value.get<std::string>();
      else if (key == "max_attempts") c.max_attempts = value.get<int>();
      else if (key == "backoff_s") c.backoff_s = value.get<double>();
      else if (key == "history") {
        const auto h = value.get<std::string>();
        if (h != "full" && h != "latest") throw ConfigError("history must be \"full\" or \"latest\"");
        c.full_history = h == "full";
      } else if (key == "extra") {
        if (!value.is_object()) throw ConfigError("extra must be an object");
        c.extra = value;
      } else if (key == "api_key" || key == "credential") {
        throw ConfigError("put the credential in an environment variable and name it with credential_env");
      } else {
        throw ConfigError("unknown completion setting '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad completion config: ") + e.what());
  }
  if (c.model.empty()) throw ConfigError("completion config needs a model");
  if (c.max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
  if (c.timeout_s <= 0) throw ConfigError("timeout_s must be positive");
  return c;
}

HttpCompletionClient::HttpCompletionClient(CompletionConfig config) : config_(std::move(config)) {
  static const std::regex url(R"((https?://[^/]+)(/.*)?)");
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, url)) {
    throw ConfigError("endpoint must look like http(s)://host[:port][/path], got '" + config_.endpoint + "'");
  }
  origin_ = m[1].str();
  path_ = m[2].str();
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/chat/completions";
  if (!config_.credential_env.empty()) {
    const char* v = std::getenv(config_.credential_env.c_str());
    if (v == nullptr || *v == '\0') {
      throw ConfigError("credential variable " + config_.credential_env + " is not set");
    }
    credential_ = v;
  }
}

Completion HttpCompletionClient::complete(const std::vector<ChatMessage>& messages) {
  nlohmann::json body = config_.extra;
  body["model"] = config_.model;
  body["temperature"] = config_.temperature;
  body["max_tokens"] = config_.max_tokens;
  body["messages"] = nlohmann::json::array();
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});

  // A client per call keeps concurrent sessions independent.
  httplib::Client cli(origin_);
  const auto whole = std::chrono::duration<double>(config_.timeout_s);
  cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(whole));
  cli.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(whole));
  cli.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(whole));
  httplib::Headers headers;
  if (!credential_.empty()) headers.emplace("Authorization", "Bearer " + credential_);

  const auto res = cli.Post(path_, headers, body.dump(), "application/json");
  if (!res) throw InfraError("completion request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw InfraError("completion endpoint returned HTTP " + std::to_string(res->status));
  }
  try {
    const auto j = nlohmann::json::parse(res->body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    Completion c;
    if (content.is_string()) {
      c.text = content.get<std::string>();
    } else if (content.is_array()) {  // content parts
      for (const auto& part : content) {
        if (part.value("type", "") == "text") c.text += part.value("text", "");
      }
    }
    if (j.contains("usage") && j["usage"].is_object()) {
      c.prompt_tokens = j["usage"].value("prompt_tokens", 0);
      c.completion_tokens = j["usage"].value("completion_tokens", 0);
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InfraError(std::string("unreadable completion response: ") + e.what());
  }
}

LlmAgent::LlmAgent(CompletionConfig config, std::shared_ptr<CompletionClient> client, Sleep sleep)
    : config_(std::move(config)), client_(std::move(client)), sleep_(std::move(sleep)) {
  if (!sleep_) {
    sleep_ = [](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); };
  }
}

void LlmAgent::reset(const PublicSetupView&, Strategy) { dialogue_.clear(); }

AgentReply LlmAgent::respond(const std::string& prompt) {
  dialogue_.push_back({"user", prompt});
  std::vector<ChatMessage> latest;
  if (!config_.full_history) latest.push_back(dialogue_.back());
  const auto& messages = config_.full_history ? dialogue_ : latest;

  std::string last_error;
  double backoff = config_.backoff_s;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto c = client_->complete(messages);
      const std::chrono::duration<double, std::milli> ms = std::chrono::steady_clock::now() - t0;
      dialogue_.push_back({"assistant", c.text});
      return {std::move(c.text), ms.count(), c.prompt_tokens, c.completion_tokens, attempt - 1};
    } catch (const InfraError& e) {
      last_error = e.what();
    }
    if (attempt < config_.max_attempts) {
      sleep_(backoff);
      backoff *= 2;
    }
  }
  dialogue_.pop_back();  // the prompt was never answered
  throw InfraError(last_error, config_.max_attempts);
}

}  // namespace vericode
