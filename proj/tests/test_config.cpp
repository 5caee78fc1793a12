#include "helpers.hpp"
#include "tutor/config.hpp"

#include <doctest.h>

#include <cstdlib>

using namespace tutor;

namespace {

// Sets an environment variable for the lifetime of the guard.
class EnvGuard {
public:
  EnvGuard(const char* name, const char* value) : name_(name) { ::setenv(name, value, 1); }
  ~EnvGuard() { ::unsetenv(name_); }

private:
  const char* name_;
};

}  // namespace

TEST_CASE("defaults without a file") {
  TutorConfig config = parse_config("");
  CHECK(config.provider == ProviderKind::Scripted);
  CHECK_FALSE(config.data_dir);
  CHECK(config.listen_host == "127.0.0.1");
  CHECK(config.listen_port == 8080);
  CHECK(config.policy.mastery_streak == 3);
  CHECK(config.http.model == "gpt-3.5-turbo-instruct");
}

TEST_CASE("sections, comments and qualified keys") {
  const auto text = R"(# tutor settings
[provider]
kind = http            # remote model
base_url = http://localhost:9000
model = local-model
max_attempts = 5
backoff_ms = 100
backoff_cap_ms = 400
timeout_ms = 2500

[policy]
mastery_streak = 4
transfer_domains = music, cooking , sports
policy.transfer_pass_score = 6

[service]
data_dir = data
listen = 0.0.0.0:9090
templates_dir = /opt/templates
)";
  TutorConfig config = parse_config(text, "/etc/tutor");
  CHECK(config.provider == ProviderKind::Http);
  CHECK(config.http.base_url == "http://localhost:9000");
  CHECK(config.http.model == "local-model");
  CHECK(config.http.max_attempts == 5);
  CHECK(config.http.backoff_base == std::chrono::milliseconds(100));
  CHECK(config.http.backoff_cap == std::chrono::milliseconds(400));
  CHECK(config.http.timeout == std::chrono::milliseconds(2500));
  CHECK(config.policy.mastery_streak == 4);
  CHECK(config.policy.transfer_pass_score == 6);
  CHECK(config.policy.transfer_domains == std::vector<std::string>{"music", "cooking", "sports"});
  CHECK(*config.data_dir == std::filesystem::path("/etc/tutor/data"));
  CHECK(*config.templates_dir == std::filesystem::path("/opt/templates"));
  CHECK(config.listen_host == "0.0.0.0");
  CHECK(config.listen_port == 9090);
}

TEST_CASE("malformed files name the offending line") {
  auto line_of = [](std::string_view text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.line;
    }
    return std::size_t{999};
  };
  CHECK(line_of("[provider]\ncolour = blue\n") == 2);
  CHECK(line_of("[provider\n") == 1);
  CHECK(line_of("\n\njust words\n") == 3);
  CHECK(line_of("[provider]\nkind = carrier pigeon\n") == 2);
  CHECK(line_of("[policy]\nmastery_streak = three\n") == 2);
  CHECK(line_of("[service]\nlisten = 8080\n") == 2);
  CHECK_THROWS_AS(parse_config("[policy]\nlower_threshold = 9\n"), ConfigError);
}

TEST_CASE("environment overrides file values") {
  TutorConfig config = parse_config("[provider]\nkind = http\nmodel = from-file\napi_key = file-key\n");
  EnvGuard model("TUTOR_MODEL", "from-env");
  EnvGuard key("TUTOR_API_KEY", "env-key");
  ::unsetenv("TUTOR_API_BASE");
  apply_environment(config);
  CHECK(config.http.model == "from-env");
  CHECK(config.http.api_key == "env-key");
  CHECK(config.http.base_url == "https://api.openai.com");
}

TEST_CASE("load_config resolves paths next to the file") {
  test::TempDir dir;
  test::write_file(dir.path() / "tutor.conf", "[provider]\nscript = session.script\n[service]\ndata_dir = logs\n");
  TutorConfig config = load_config(dir.path() / "tutor.conf");
  CHECK(*config.script_path == dir.path() / "session.script");
  CHECK(*config.data_dir == dir.path() / "logs");
  CHECK_THROWS_AS(load_config(dir.path() / "missing.conf"), ConfigError);
}

TEST_CASE("make_service wires the scripted provider and a file store") {
  test::TempDir dir;
  TutorConfig config;
  config.script_path = test::fixture_path("photosynthesis_session.script");
  config.data_dir = dir.path() / "sessions";
  config.templates_dir = std::filesystem::path(TUTOR_TEMPLATES);

  auto service = make_service(config);
  CHECK(service->provider().id() == "scripted");
  auto view = service->create_session("photosynthesis");
  service->submit_answer(view.session_id, "D");
  CHECK(std::filesystem::exists(config.data_dir.value()));

  auto reopened = make_service(config);
  CHECK(reopened->session_ids() == std::vector<std::string>{view.session_id});
  CHECK(reopened->get_session(view.session_id).turn_count == 1);
}

TEST_CASE("make_service needs a script for the scripted provider") {
  CHECK_THROWS_AS(make_service(TutorConfig{}), ConfigError);
  TutorConfig http;
  http.provider = ProviderKind::Http;
  CHECK(make_provider(http)->id() == "http:gpt-3.5-turbo-instruct");
}
