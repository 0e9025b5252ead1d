#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "storyworld/render.hpp"

namespace storyworld {

enum class BackendKind { Scripted, ChatCompletions, Gemini };

std::string_view to_string(BackendKind kind);
std::optional<BackendKind> backend_kind_from_string(std::string_view s);

struct BackendConfig {
  BackendKind kind{BackendKind::Scripted};
  std::string endpoint;        // e.g. "https://api.groq.com/openai/v1" or "http://127.0.0.1:8080"
  std::string model;
  std::string credential_env;  // name of the environment variable holding the API key; empty = no auth
  double timeout_seconds{60.0};
  int retries{2};
  int retry_backoff_ms{500};   // doubled after every failed attempt
  double temperature{0.0};

  // Scripted backends only.
  std::vector<std::string> script;
  std::vector<std::pair<std::string, std::string>> overrides;  // input substring -> reply
  int delay_ms{0};
};

// Turns a prompt into the raw suggestion text. Failures throw Error with code
// "transport-failure", "auth-failure" or "script-exhausted".
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string suggest(const PromptPair& prompt) = 0;
};

// Deterministic stand-in for an LLM. Replies are consumed one per call; an override
// whose key occurs in the player input (case-insensitive) answers instead, without
// consuming the queue.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(std::vector<std::string> replies,
                           std::vector<std::pair<std::string, std::string>> overrides = {},
                           std::chrono::milliseconds delay = std::chrono::milliseconds(0));

  std::string suggest(const PromptPair& prompt) override;
  size_t remaining() const;

 private:
  mutable std::mutex mutex_;
  std::deque<std::string> queue_;
  std::vector<std::pair<std::string, std::string>> overrides_;
  std::chrono::milliseconds delay_;
};

// OpenAI-style "chat/completions": one system and one user message per call.
class ChatCompletionsBackend : public Backend {
 public:
  ChatCompletionsBackend(BackendConfig config, std::string api_key);
  std::string suggest(const PromptPair& prompt) override;

 private:
  BackendConfig config_;
  std::string api_key_;
};

// Gemini-style "models/{model}:generateContent".
class GeminiBackend : public Backend {
 public:
  GeminiBackend(BackendConfig config, std::string api_key);
  std::string suggest(const PromptPair& prompt) override;

 private:
  BackendConfig config_;
  std::string api_key_;
};

// Throws Error{"backend-config-error"} for invalid settings or a missing credential.
std::unique_ptr<Backend> make_backend(const BackendConfig& config);

// Request bodies and reply extraction for the two wire formats (exposed for tests).
std::string chat_completions_request(const BackendConfig& config, const PromptPair& prompt);
std::string chat_completions_reply_text(const std::string& body);
std::string gemini_request(const BackendConfig& config, const PromptPair& prompt);
std::string gemini_reply_text(const std::string& body);

}  // namespace storyworld
