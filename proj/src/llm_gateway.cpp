#include "tutor/llm_gateway.hpp"

#include "tutor/text.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace tutor {

using json = nlohmann::json;

void CompletionRequest::validate() const {
  if (prompt.text.empty()) throw std::invalid_argument("completion prompt is empty");
  if (max_tokens < 1) throw std::invalid_argument("max_tokens must be positive");
  if (temperature < 0.0 || temperature > 2.0) throw std::invalid_argument("temperature outside [0, 2]");
  if (stop_sequences.size() > 4) throw std::invalid_argument("at most 4 stop sequences");
}

ProviderTimeout::ProviderTimeout(int n)
    : GatewayError("provider timed out after " + std::to_string(n) + " attempt(s)"), attempts(n) {}

ProviderRejected::ProviderRejected(int code, std::string excerpt)
    : GatewayError("provider rejected request with status " + std::to_string(code) + ": " + excerpt),
      status(code),
      body_excerpt(std::move(excerpt)) {}

AttemptsExceeded::AttemptsExceeded(int n, const std::string& last_error)
    : GatewayError("provider failed after " + std::to_string(n) + " attempts: " + last_error), attempts(n) {}

ScriptParseError::ScriptParseError(std::size_t at, const std::string& why)
    : GatewayError("script line " + std::to_string(at) + ": " + why), line(at) {}

std::vector<ScriptEntry> parse_script(std::string_view text) {
  auto lines = split_lines(text);
  if (!text.empty() && text.back() == '\n') lines.pop_back();
  if (text.empty()) lines.clear();

  std::vector<ScriptEntry> entries;
  std::vector<std::string> body;
  std::size_t entry_start = 1;

  auto finish = [&](std::size_t separator_line, bool last) {
    ScriptEntry entry;
    std::size_t first = 0;
    if (!body.empty() && body.front().rfind("guard:", 0) == 0) {
      auto guard = trim(std::string_view(body.front()).substr(6));
      if (guard.empty()) throw ScriptParseError(entry_start, "empty guard");
      entry.guard = std::move(guard);
      first = 1;
    }
    for (std::size_t i = first; i < body.size(); ++i) {
      if (i > first) entry.completion += '\n';
      entry.completion += body[i];
    }
    if (!entry.guard && trim(entry.completion).empty()) {
      if (!last) throw ScriptParseError(separator_line, "empty entry");
    } else {
      entries.push_back(std::move(entry));
    }
    body.clear();
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i] == "---") {
      finish(i + 1, false);
      entry_start = i + 2;
    } else {
      body.push_back(lines[i]);
    }
  }
  finish(lines.size(), true);
  return entries;
}

ScriptedProvider::ScriptedProvider(std::vector<ScriptEntry> entries)
    : entries_(std::move(entries)), consumed_(entries_.size(), false) {}

CompletionResult ScriptedProvider::complete(const CompletionRequest& request) {
  request.validate();
  const auto start = std::chrono::steady_clock::now();
  std::lock_guard lock(mutex_);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (consumed_[i]) continue;
    const auto& guard = entries_[i].guard;
    if (guard && request.prompt.text.find(*guard) == std::string::npos) continue;
    consumed_[i] = true;
    auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return CompletionResult{entries_[i].completion, id(), latency, 1};
  }
  throw ScriptExhausted();
}

std::size_t ScriptedProvider::remaining() const {
  std::lock_guard lock(mutex_);
  return static_cast<std::size_t>(std::count(consumed_.begin(), consumed_.end(), false));
}

std::shared_ptr<ScriptedProvider> load_script(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScriptParseError(0, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::make_shared<ScriptedProvider>(parse_script(buf.str()));
}

void HttpProviderConfig::apply_environment() {
  if (const char* v = std::getenv("TUTOR_API_BASE"); v && *v) base_url = v;
  if (const char* v = std::getenv("TUTOR_API_KEY"); v && *v) api_key = v;
  if (const char* v = std::getenv("TUTOR_MODEL"); v && *v) model = v;
}

std::chrono::milliseconds backoff_delay(const HttpProviderConfig& config, int failed_attempt) {
  auto delay = config.backoff_base;
  for (int k = 1; k < failed_attempt && delay < config.backoff_cap; ++k) delay *= 2;
  return std::min(delay, config.backoff_cap);
}

HttpProvider::HttpProvider(HttpProviderConfig config, Sleeper sleeper)
    : config_(std::move(config)), sleep_(std::move(sleeper)) {
  if (config_.max_attempts < 1) throw std::invalid_argument("max_attempts must be at least 1");
  if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string HttpProvider::id() const { return "http:" + config_.model; }

namespace {

// Splits "http://host:port/prefix" into the client origin and the path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& base) {
  auto scheme = base.find("://");
  auto path_at = base.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_at == std::string::npos) return {base, ""};
  std::string prefix = base.substr(path_at);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base.substr(0, path_at), prefix};
}

}  // namespace

CompletionResult HttpProvider::complete(const CompletionRequest& request) {
  request.validate();
  const auto [origin, prefix] = split_base_url(config_.base_url);
  const std::string path = prefix + "/v1/completions";

  json body = {
      {"model", config_.model},
      {"prompt", request.prompt.text},
      {"max_tokens", request.max_tokens},
      {"temperature", request.temperature},
  };
  if (!request.stop_sequences.empty()) body["stop"] = request.stop_sequences;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  const auto start = std::chrono::steady_clock::now();
  bool last_was_timeout = false;
  std::string last_error;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    if (attempt > 1) sleep_(backoff_delay(config_, attempt - 1));

    httplib::Client client(origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto res = client.Post(path, headers, payload, "application/json");
    if (!res) {
      const auto err = res.error();
      last_was_timeout = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
      last_error = httplib::to_string(err);
      continue;
    }
    last_was_timeout = false;
    if (res->status == 429 || res->status >= 500) {
      last_error = "status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) throw ProviderRejected(res->status, excerpt_at(res->body, 0, 200));

    auto parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("choices") || !parsed["choices"].is_array() ||
        parsed["choices"].empty() || !parsed["choices"][0].contains("text") ||
        !parsed["choices"][0]["text"].is_string()) {
      throw ProviderRejected(res->status, "malformed completion body: " + excerpt_at(res->body, 0, 200));
    }
    auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return CompletionResult{parsed["choices"][0]["text"].get<std::string>(), id(), latency, attempt};
  }
  if (last_was_timeout) throw ProviderTimeout(config_.max_attempts);
  throw AttemptsExceeded(config_.max_attempts, last_error);
}

}  // namespace tutor
