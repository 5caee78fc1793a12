#pragma once

#include "tutor/api.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace tutor {

enum class CliMode { Interactive, Replay };
enum class OutputFormat { Plain, Structured };

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kProvider = 2;
inline constexpr int kParse = 3;
}  // namespace exit_code

struct CliConfig {
  CliMode mode = CliMode::Interactive;
  std::optional<std::string> server_url;  // remote mode when set
  bool embedded = false;
  std::optional<std::filesystem::path> script_path;
  std::optional<std::filesystem::path> answers_path;  // Replay only
  std::optional<OutputFormat> output;  // Plain for interactive, Structured for replay by default
  std::optional<std::filesystem::path> config_path;
  std::optional<std::filesystem::path> data_dir;
  std::string topic;

  // Throws std::invalid_argument on inconsistent flags.
  void validate() const;
  OutputFormat effective_output() const;
};

// Exit status for an API error body ({"error": {"code": ...}}).
int exit_code_for(const Json& error_body, int http_status);

// Prompts for answers on `in` until mastery or end of input.
int run_interactive(TutorClient& client, const CliConfig& config, std::istream& in, std::ostream& out,
                    std::ostream& err);

// Feeds the answers file (one answer per non-blank line) through a session and
// writes a byte-deterministic transcript.
int run_replay(TutorClient& client, const CliConfig& config, std::ostream& out, std::ostream& err);

// Flag parsing and client construction around run_interactive / run_replay.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace tutor
