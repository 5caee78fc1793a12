#include "tutor/config.hpp"

#include "tutor/text.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace tutor {

ConfigError::ConfigError(std::size_t at, const std::string& why)
    : std::runtime_error("config line " + std::to_string(at) + ": " + why), line(at) {}

namespace {

int parse_int(std::string_view value, std::size_t line) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError(line, "expected an integer, got '" + std::string(value) + "'");
  }
  return out;
}

std::vector<std::string> parse_list(std::string_view value) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= value.size()) {
    auto comma = value.find(',', start);
    if (comma == std::string_view::npos) comma = value.size();
    auto item = trim(value.substr(start, comma - start));
    if (!item.empty()) items.push_back(std::move(item));
    start = comma + 1;
  }
  return items;
}

std::filesystem::path resolve(const std::filesystem::path& base, std::string_view value) {
  std::filesystem::path p{std::string(value)};
  if (p.is_relative() && !base.empty()) return base / p;
  return p;
}

}  // namespace

TutorConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  TutorConfig config;
  std::string section;
  std::size_t line_no = 0;
  for (const auto& raw : split_lines(text)) {
    ++line_no;
    auto line = trim(raw);
    if (auto hash = line.find('#'); hash != std::string::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected key = value");
    auto key = trim(std::string_view(line).substr(0, eq));
    auto value = trim(std::string_view(line).substr(eq + 1));
    if (key.find('.') == std::string::npos && !section.empty()) key = section + "." + key;

    auto ms = [&] { return std::chrono::milliseconds(parse_int(value, line_no)); };
    if (key == "provider.kind") {
      if (value == "scripted") {
        config.provider = ProviderKind::Scripted;
      } else if (value == "http") {
        config.provider = ProviderKind::Http;
      } else {
        throw ConfigError(line_no, "provider kind must be 'scripted' or 'http'");
      }
    } else if (key == "provider.script") {
      config.script_path = resolve(base_dir, value);
    } else if (key == "provider.base_url") {
      config.http.base_url = value;
    } else if (key == "provider.model") {
      config.http.model = value;
    } else if (key == "provider.api_key") {
      config.http.api_key = value;
    } else if (key == "provider.max_attempts") {
      config.http.max_attempts = parse_int(value, line_no);
    } else if (key == "provider.backoff_ms") {
      config.http.backoff_base = ms();
    } else if (key == "provider.backoff_cap_ms") {
      config.http.backoff_cap = ms();
    } else if (key == "provider.timeout_ms") {
      config.http.timeout = ms();
    } else if (key == "policy.raise_threshold") {
      config.policy.raise_threshold = parse_int(value, line_no);
    } else if (key == "policy.lower_threshold") {
      config.policy.lower_threshold = parse_int(value, line_no);
    } else if (key == "policy.mastery_streak") {
      config.policy.mastery_streak = parse_int(value, line_no);
    } else if (key == "policy.required_transfer_passes") {
      config.policy.required_transfer_passes = parse_int(value, line_no);
    } else if (key == "policy.transfer_pass_score") {
      config.policy.transfer_pass_score = parse_int(value, line_no);
    } else if (key == "policy.transfer_domains") {
      config.policy.transfer_domains = parse_list(value);
    } else if (key == "service.data_dir") {
      config.data_dir = resolve(base_dir, value);
    } else if (key == "service.listen") {
      auto colon = value.rfind(':');
      if (colon == std::string::npos) throw ConfigError(line_no, "listen address must be host:port");
      config.listen_host = value.substr(0, colon);
      config.listen_port = parse_int(std::string_view(value).substr(colon + 1), line_no);
    } else if (key == "service.templates_dir") {
      config.templates_dir = resolve(base_dir, value);
    } else if (key == "service.static_dir") {
      config.static_dir = resolve(base_dir, value);
    } else {
      throw ConfigError(line_no, "unknown key '" + key + "'");
    }
  }
  try {
    config.policy.validate();
  } catch (const ValidationError& err) {
    throw ConfigError(0, err.what());
  }
  return config;
}

TutorConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

void apply_environment(TutorConfig& config) { config.http.apply_environment(); }

std::shared_ptr<CompletionProvider> make_provider(const TutorConfig& config) {
  if (config.provider == ProviderKind::Http) return std::make_shared<HttpProvider>(config.http);
  if (!config.script_path) throw ConfigError(0, "scripted provider needs a script path");
  return load_script(*config.script_path);
}

std::shared_ptr<EventStore> make_store(const TutorConfig& config) {
  if (config.data_dir) return std::make_shared<FileEventStore>(*config.data_dir);
  return std::make_shared<MemoryEventStore>();
}

std::shared_ptr<SessionService> make_service(const TutorConfig& config, SessionService::IdGenerator next_id,
                                             SessionService::Clock clock) {
  SessionService::Dependencies deps{
      make_provider(config),
      make_store(config),
      config.templates_dir ? PromptForge(TemplateSet::load(*config.templates_dir)) : PromptForge(),
      config.policy,
      std::move(clock),
      std::move(next_id),
  };
  auto service = std::make_shared<SessionService>(std::move(deps));
  service->recover();
  return service;
}

}  // namespace tutor
