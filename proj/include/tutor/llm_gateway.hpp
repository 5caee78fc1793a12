#pragma once

#include "tutor/prompt_forge.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tutor {

struct CompletionRequest {
  PromptText prompt;
  int max_tokens = 512;
  double temperature = 0.7;
  std::vector<std::string> stop_sequences;

  static constexpr double kGenerationTemperature = 0.7;
  static constexpr double kEvaluationTemperature = 0.0;

  void validate() const;
};

struct CompletionResult {
  std::string text;
  std::string provider_id;
  std::chrono::milliseconds latency{0};
  int attempt_count = 1;
};

struct GatewayError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProviderTimeout : GatewayError {
  explicit ProviderTimeout(int attempts);
  int attempts;
};

struct ProviderRejected : GatewayError {
  ProviderRejected(int status, std::string body_excerpt);
  int status;
  std::string body_excerpt;
};

struct AttemptsExceeded : GatewayError {
  AttemptsExceeded(int attempts, const std::string& last_error);
  int attempts;
};

struct ScriptExhausted : GatewayError {
  ScriptExhausted() : GatewayError("completion script exhausted") {}
};

struct ScriptParseError : GatewayError {
  ScriptParseError(std::size_t line, const std::string& why);
  std::size_t line;
};

class CompletionProvider {
public:
  virtual ~CompletionProvider() = default;
  virtual CompletionResult complete(const CompletionRequest& request) = 0;
  virtual std::string id() const = 0;
};

struct ScriptEntry {
  std::optional<std::string> guard;  // substring the prompt must contain
  std::string completion;

  friend bool operator==(const ScriptEntry&, const ScriptEntry&) = default;
};

// Entries separated by lines holding only "---"; an entry may open with a
// "guard: <substring>" line. Throws ScriptParseError.
std::vector<ScriptEntry> parse_script(std::string_view text);

// Replays canned completions. Each call consumes the first unconsumed entry,
// in file order, whose guard matches the prompt. Thread-safe; concurrent
// callers observe one global consumption order.
class ScriptedProvider final : public CompletionProvider {
public:
  explicit ScriptedProvider(std::vector<ScriptEntry> entries);

  CompletionResult complete(const CompletionRequest& request) override;
  std::string id() const override { return "scripted"; }

  std::size_t remaining() const;

private:
  mutable std::mutex mutex_;
  std::vector<ScriptEntry> entries_;
  std::vector<bool> consumed_;
};

std::shared_ptr<ScriptedProvider> load_script(const std::filesystem::path& path);

struct HttpProviderConfig {
  std::string base_url = "https://api.openai.com";
  std::string api_key;
  std::string model = "gpt-3.5-turbo-instruct";
  int max_attempts = 3;
  std::chrono::milliseconds backoff_base{500};
  std::chrono::milliseconds backoff_cap{8000};
  std::chrono::milliseconds timeout{30000};

  // TUTOR_API_BASE, TUTOR_API_KEY and TUTOR_MODEL override the fields they name.
  void apply_environment();
};

// Delay before attempt k+1 after attempt k failed (k >= 1): base * 2^(k-1), capped.
std::chrono::milliseconds backoff_delay(const HttpProviderConfig& config, int failed_attempt);

// OpenAI-compatible completions client: POST {base_url}/v1/completions.
// Retries timeouts, connection failures, 429 and 5xx.
class HttpProvider final : public CompletionProvider {
public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit HttpProvider(HttpProviderConfig config, Sleeper sleeper = {});

  CompletionResult complete(const CompletionRequest& request) override;
  std::string id() const override;

private:
  HttpProviderConfig config_;
  Sleeper sleep_;
};

}  // namespace tutor
