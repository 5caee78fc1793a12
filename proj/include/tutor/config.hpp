#pragma once

#include "tutor/adaptivity.hpp"
#include "tutor/event_store.hpp"
#include "tutor/llm_gateway.hpp"
#include "tutor/session_service.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace tutor {

struct ConfigError : std::runtime_error {
  ConfigError(std::size_t line, const std::string& why);
  std::size_t line;
};

enum class ProviderKind { Scripted, Http };

// Plain key-value file:
//
//   # comment
//   [provider]
//   kind = scripted            # or http
//   script = fixtures/session.script
//   base_url = https://api.openai.com
//   model = gpt-3.5-turbo-instruct
//   max_attempts = 3
//   backoff_ms = 500
//   backoff_cap_ms = 8000
//   timeout_ms = 30000
//   [policy]
//   raise_threshold = 8
//   lower_threshold = 4
//   mastery_streak = 3
//   required_transfer_passes = 2
//   transfer_pass_score = 7
//   transfer_domains = art, history, engineering, everyday life, sports
//   [service]
//   data_dir = tutor-data
//   listen = 127.0.0.1:8080
//   templates_dir = templates
//   static_dir = web
//
// Keys may also be written fully qualified ("policy.mastery_streak = 3").
struct TutorConfig {
  ProviderKind provider = ProviderKind::Scripted;
  std::optional<std::filesystem::path> script_path;
  HttpProviderConfig http;
  AdaptivityPolicy policy;
  std::optional<std::filesystem::path> data_dir;  // in-memory store when absent
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::optional<std::filesystem::path> templates_dir;
  std::optional<std::filesystem::path> static_dir;
};

// Relative paths in the file are resolved against `base_dir` when given.
TutorConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
TutorConfig load_config(const std::filesystem::path& path);

// Environment variables from the gateway (TUTOR_API_KEY, TUTOR_API_BASE,
// TUTOR_MODEL) take precedence over file values.
void apply_environment(TutorConfig& config);

std::shared_ptr<CompletionProvider> make_provider(const TutorConfig& config);
std::shared_ptr<EventStore> make_store(const TutorConfig& config);

// Provider, store, templates and policy from `config`; sessions already in the
// store are recovered.
std::shared_ptr<SessionService> make_service(const TutorConfig& config, SessionService::IdGenerator next_id = {},
                                             SessionService::Clock clock = {});

}  // namespace tutor
