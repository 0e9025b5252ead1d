#include "storyworld/llm_gateway.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "storyworld/error.hpp"

namespace storyworld {

using nlohmann::json;

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string base_path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error("backend-config-error", "endpoint '" + url + "' has no scheme");
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error("backend-config-error", "endpoint scheme must be http or https");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = url.substr(0, path_start);
  e.base_path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!e.base_path.empty() && e.base_path.back() == '/') e.base_path.pop_back();
  return e;
}

// POSTs a JSON body, retrying connection errors, 429 and 5xx up to the retry budget.
std::string post_json(const BackendConfig& config, const std::string& path, const httplib::Headers& headers,
                      const std::string& body) {
  const auto endpoint = split_endpoint(config.endpoint);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(config.timeout_seconds));

  std::string last_error;
  auto backoff = std::chrono::milliseconds(config.retry_backoff_ms);
  for (int attempt = 0; attempt <= config.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    // A fresh connection per attempt, so a retry never rides a socket the server has dropped.
    httplib::Client client(endpoint.origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(endpoint.base_path + path, headers, body, "application/json");
    if (!res) {
      last_error = "connection error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw Error("auth-failure", "backend rejected credentials (HTTP " + std::to_string(res->status) + ")");
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw Error("transport-failure", "backend answered HTTP " + std::to_string(res->status));
    }
    return res->body;
  }
  throw Error("transport-failure",
              "backend unreachable after " + std::to_string(config.retries + 1) + " attempts (" + last_error + ")");
}

std::string read_credential(const BackendConfig& config) {
  if (config.credential_env.empty()) return {};
  const char* value = std::getenv(config.credential_env.c_str());
  if (value == nullptr || *value == '\0') {
    throw Error("backend-config-error", "environment variable " + config.credential_env + " is not set");
  }
  return value;
}

bool contains_folded(const std::string& haystack, const std::string& needle) {
  return fold_case(haystack).find(fold_case(needle)) != std::string::npos;
}

}  // namespace

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::Scripted: return "scripted";
    case BackendKind::ChatCompletions: return "chat-completions";
    case BackendKind::Gemini: return "gemini";
  }
  return "?";
}

std::optional<BackendKind> backend_kind_from_string(std::string_view s) {
  for (auto k : {BackendKind::Scripted, BackendKind::ChatCompletions, BackendKind::Gemini}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

// ---------------- Scripted ----------------

ScriptedBackend::ScriptedBackend(std::vector<std::string> replies,
                                 std::vector<std::pair<std::string, std::string>> overrides,
                                 std::chrono::milliseconds delay)
    : queue_(replies.begin(), replies.end()), overrides_(std::move(overrides)), delay_(delay) {}

std::string ScriptedBackend::suggest(const PromptPair& prompt) {
  if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
  std::lock_guard lock(mutex_);
  if (!overrides_.empty()) {
    const auto input = extract_player_input(prompt.user_msg).value_or(prompt.user_msg);
    for (const auto& [key, reply] : overrides_) {
      if (contains_folded(input, key)) return reply;
    }
  }
  if (queue_.empty()) throw Error("script-exhausted", "scripted backend has no replies left");
  auto reply = std::move(queue_.front());
  queue_.pop_front();
  return reply;
}

size_t ScriptedBackend::remaining() const {
  std::lock_guard lock(mutex_);
  return queue_.size();
}

// ---------------- Chat completions ----------------

std::string chat_completions_request(const BackendConfig& config, const PromptPair& prompt) {
  json body = {
      {"model", config.model},
      {"temperature", config.temperature},
      {"messages",
       json::array({{{"role", "system"}, {"content", prompt.system_msg}},
                    {{"role", "user"}, {"content", prompt.user_msg}}})},
  };
  return body.dump();
}

std::string chat_completions_reply_text(const std::string& body) {
  const auto doc = json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw Error("transport-failure", "backend reply is not JSON");
  try {
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw Error("transport-failure", std::string("unexpected chat-completions reply: ") + e.what());
  }
}

ChatCompletionsBackend::ChatCompletionsBackend(BackendConfig config, std::string api_key)
    : config_(std::move(config)), api_key_(std::move(api_key)) {}

std::string ChatCompletionsBackend::suggest(const PromptPair& prompt) {
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  return chat_completions_reply_text(post_json(config_, "/chat/completions", headers,
                                               chat_completions_request(config_, prompt)));
}

// ---------------- Gemini ----------------

std::string gemini_request(const BackendConfig& config, const PromptPair& prompt) {
  json body = {
      {"systemInstruction", {{"parts", json::array({{{"text", prompt.system_msg}}})}}},
      {"contents", json::array({{{"role", "user"}, {"parts", json::array({{{"text", prompt.user_msg}}})}}})},
      {"generationConfig", {{"temperature", config.temperature}}},
  };
  return body.dump();
}

std::string gemini_reply_text(const std::string& body) {
  const auto doc = json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw Error("transport-failure", "backend reply is not JSON");
  try {
    std::string text;
    for (const auto& part : doc.at("candidates").at(0).at("content").at("parts")) {
      text += part.at("text").get<std::string>();
    }
    return text;
  } catch (const json::exception& e) {
    throw Error("transport-failure", std::string("unexpected generateContent reply: ") + e.what());
  }
}

GeminiBackend::GeminiBackend(BackendConfig config, std::string api_key)
    : config_(std::move(config)), api_key_(std::move(api_key)) {}

std::string GeminiBackend::suggest(const PromptPair& prompt) {
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("x-goog-api-key", api_key_);
  return gemini_reply_text(
      post_json(config_, "/models/" + config_.model + ":generateContent", headers, gemini_request(config_, prompt)));
}

// ---------------- Factory ----------------

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
  if (!(config.timeout_seconds > 0)) throw Error("backend-config-error", "timeout must be positive");
  if (config.retries < 0) throw Error("backend-config-error", "retries must be non-negative");
  switch (config.kind) {
    case BackendKind::Scripted:
      return std::make_unique<ScriptedBackend>(config.script, config.overrides,
                                               std::chrono::milliseconds(config.delay_ms));
    case BackendKind::ChatCompletions:
    case BackendKind::Gemini: {
      if (config.endpoint.empty()) throw Error("backend-config-error", "remote backend needs an endpoint");
      split_endpoint(config.endpoint);
      if (config.model.empty()) throw Error("backend-config-error", "remote backend needs a model id");
      auto key = read_credential(config);
      if (config.kind == BackendKind::Gemini) return std::make_unique<GeminiBackend>(config, std::move(key));
      return std::make_unique<ChatCompletionsBackend>(config, std::move(key));
    }
  }
  throw Error("backend-config-error", "unknown backend kind");
}

}  // namespace storyworld
