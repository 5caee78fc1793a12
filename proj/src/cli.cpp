#include "tutor/cli.hpp"

#include "tutor/config.hpp"
#include "tutor/text.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace tutor {

namespace {

ApiResponse call(TutorClient& client, std::string_view method, std::string_view path, const Json& body = nullptr) {
  try {
    return client.request(method, path, body.is_null() ? std::string{} : body.dump());
  } catch (const std::exception& e) {
    Json error;
    error["error"] = {{"code", "Unreachable"}, {"message", e.what()}};
    return {0, error.dump()};
  }
}

bool ok(const ApiResponse& r) { return r.status >= 200 && r.status < 300; }

Json body_of(const ApiResponse& r) {
  auto j = Json::parse(r.body, nullptr, false);
  if (j.is_discarded()) {
    Json error;
    error["error"] = {{"code", "Internal"}, {"message", "unreadable response: " + excerpt_at(r.body, 0)}};
    return error;
  }
  return j;
}

std::string error_code(const Json& body) {
  if (body.contains("error") && body["error"].contains("code")) return body["error"]["code"].get<std::string>();
  return "Internal";
}

std::string error_message(const Json& body) {
  if (!body.contains("error")) return "unknown error";
  const auto& e = body["error"];
  std::string message = e.value("message", std::string("unknown error"));
  if (e.contains("failure")) {
    const auto& f = e["failure"];
    message += "\n  excerpt: \"" + f.value("excerpt", std::string{}) + "\"";
  }
  return message;
}

std::string kind_label(const Json& q) {
  const auto kind = q.value("kind", std::string{});
  if (kind == "multiple_choice") return "multiple choice";
  if (kind == "short_answer") return "short answer";
  if (kind == "transfer") return "transfer: " + q.value("transfer_domain", std::string{});
  return kind;
}

void print_question(std::ostream& out, const Json& q, std::size_t number) {
  out << "\nQuestion " << number << " (level " << q.value("difficulty", 0) << "/5, " << kind_label(q) << ")\n";
  out << q.value("stem", std::string{}) << "\n";
  if (q.contains("options")) {
    for (const auto& option : q["options"]) {
      out << "  " << option.value("label", std::string{}) << ") " << option.value("text", std::string{}) << "\n";
    }
    out << "Your answer (A-D):\n";
  } else {
    out << "Your answer:\n";
  }
}

void print_evaluation(std::ostream& out, const Json& evaluation) {
  out << "Score: " << evaluation.value("score", 0) << "/10\n";
  out << "Feedback: " << evaluation.value("feedback", std::string{}) << "\n";
  if (evaluation.contains("hint")) out << "Hint: " << evaluation["hint"].get<std::string>() << "\n";
}

Json turn_record(std::size_t number, const Json& question, const std::string& answer, const Json& result) {
  Json record;
  record["type"] = "turn";
  record["turn"] = number;
  record["question"] = question;
  record["answer"] = answer;
  record["evaluation"] = result.at("evaluation");
  record["difficulty_after"] = result.at("difficulty_after");
  record["phase_after"] = result.at("phase_after");
  return record;
}

// Reports an API error in the selected format and returns the exit status.
int report_error(const ApiResponse& response, OutputFormat format, std::ostream& out, std::ostream& err) {
  const Json body = body_of(response);
  if (format == OutputFormat::Structured) {
    Json record;
    record["type"] = "error";
    record["code"] = error_code(body);
    if (body.contains("error") && body["error"].contains("failure")) record["failure"] = body["error"]["failure"];
    out << record.dump() << "\n";
  }
  err << "error: " << error_message(body) << "\n";
  out.flush();
  return exit_code_for(body, response.status);
}

std::string session_path(const std::string& id, std::string_view suffix = {}) {
  return "/api/sessions/" + id + std::string(suffix);
}

}  // namespace

void CliConfig::validate() const {
  if (server_url && embedded) throw std::invalid_argument("--server and --embedded are mutually exclusive");
  if (mode == CliMode::Replay) {
    if (!script_path || !answers_path) throw std::invalid_argument("replay mode needs both --script and --answers");
    if (server_url) throw std::invalid_argument("replay mode runs the embedded engine; drop --server");
    if (trim(topic).empty()) throw std::invalid_argument("replay mode needs --topic");
  }
  if (server_url && (script_path || data_dir || config_path)) {
    throw std::invalid_argument("--script, --data-dir and --config configure the embedded engine only");
  }
}

OutputFormat CliConfig::effective_output() const {
  if (output) return *output;
  return mode == CliMode::Replay ? OutputFormat::Structured : OutputFormat::Plain;
}

int exit_code_for(const Json& error_body, int http_status) {
  const auto code = error_code(error_body);
  if (code == "GenerationUnparseable" || code == "EvaluationUnparseable") return exit_code::kParse;
  if (code == "ProviderUnavailable" || code == "Unreachable" || code == "Internal" || code == "ExhaustedDomains") {
    return exit_code::kProvider;
  }
  if (http_status >= 500 || http_status == 0) return exit_code::kProvider;
  return exit_code::kUsage;
}

int run_interactive(TutorClient& client, const CliConfig& config, std::istream& in, std::ostream& out,
                    std::ostream& err) {
  const auto format = config.effective_output();
  std::string topic = trim(config.topic);
  if (topic.empty()) {
    out << "Topic: " << std::flush;
    std::string line;
    if (!std::getline(in, line)) return exit_code::kOk;
    topic = trim(line);
  }

  auto created = call(client, "POST", "/api/sessions", Json{{"topic", topic}});
  if (!ok(created)) return report_error(created, format, out, err);
  Json view = body_of(created);
  const std::string id = view.at("session_id").get<std::string>();
  if (format == OutputFormat::Plain) out << "Session " << id << " on \"" << topic << "\"\n";

  Json pending = view.at("pending_question");
  std::size_t turn = view.value("turn_count", std::size_t{0});
  while (!pending.is_null()) {
    if (format == OutputFormat::Plain) {
      print_question(out, pending, turn + 1);
    } else {
      out << Json{{"type", "question"}, {"question", pending}}.dump() << "\n";
    }
    out.flush();

    std::string answer;
    do {
      if (!std::getline(in, answer)) {
        if (format == OutputFormat::Plain) out << "\nSession saved (" << id << ", " << turn << " turns).\n";
        return exit_code::kOk;
      }
      answer = trim(answer);
    } while (answer.empty());

    auto submitted = call(client, "POST", session_path(id, "/answer"),
                          Json{{"answer", answer}, {"question_id", pending.at("id")}});
    if (submitted.status == 422) {
      err << "error: " << error_message(body_of(submitted)) << "\n";
      continue;
    }
    if (!ok(submitted)) return report_error(submitted, format, out, err);
    const Json result = body_of(submitted);
    ++turn;
    if (format == OutputFormat::Plain) {
      print_evaluation(out, result.at("evaluation"));
    } else {
      out << turn_record(turn, pending, answer, result).dump() << "\n";
    }
    const auto& next = result.at("next");
    if (next.at("type") == "mastery") {
      if (format == OutputFormat::Plain) {
        out << "\n*** Mastery reached: " << topic << " after " << turn << " turns ***\n";
      } else {
        out << Json{{"type", "mastery"}, {"topic", topic}, {"turns", turn}}.dump() << "\n";
      }
      return exit_code::kOk;
    }
    pending = next.at("question");
  }
  err << "error: session has no pending question\n";
  return exit_code::kProvider;
}

int run_replay(TutorClient& client, const CliConfig& config, std::ostream& out, std::ostream& err) {
  const auto format = config.effective_output();
  std::ifstream file(*config.answers_path);
  if (!file) {
    err << "error: cannot read answers file " << config.answers_path->string() << "\n";
    return exit_code::kUsage;
  }
  std::vector<std::string> answers;
  for (std::string line; std::getline(file, line);) {
    auto answer = trim(line);
    if (!answer.empty()) answers.push_back(std::move(answer));
  }

  const std::string topic = trim(config.topic);
  auto created = call(client, "POST", "/api/sessions", Json{{"topic", topic}});
  if (!ok(created)) return report_error(created, format, out, err);
  const Json view = body_of(created);
  const std::string id = view.at("session_id").get<std::string>();

  Json pending = view.at("pending_question");
  std::size_t turn = 0;
  while (!pending.is_null()) {
    if (turn >= answers.size()) {
      if (format == OutputFormat::Structured) {
        out << Json{{"type", "incomplete"}, {"turns", turn}, {"pending_question", pending}}.dump() << "\n";
      }
      out.flush();
      err << "error: answers file ended after " << turn << " turns before the session finished\n";
      return exit_code::kUsage;
    }
    const std::string& answer = answers[turn];
    if (format == OutputFormat::Plain) {
      print_question(out, pending, turn + 1);
      out << answer << "\n";
    }
    auto submitted = call(client, "POST", session_path(id, "/answer"),
                          Json{{"answer", answer}, {"question_id", pending.at("id")}});
    if (!ok(submitted)) return report_error(submitted, format, out, err);
    const Json result = body_of(submitted);
    ++turn;
    if (format == OutputFormat::Structured) {
      out << turn_record(turn, pending, answer, result).dump() << "\n";
    } else {
      print_evaluation(out, result.at("evaluation"));
    }
    const auto& next = result.at("next");
    if (next.at("type") == "mastery") {
      if (format == OutputFormat::Structured) {
        out << Json{{"type", "mastery"}, {"topic", topic}, {"turns", turn}}.dump() << "\n";
      } else {
        out << "\n*** Mastery reached: " << topic << " after " << turn << " turns ***\n";
      }
      out.flush();
      return exit_code::kOk;
    }
    pending = next.at("question");
  }
  err << "error: session has no pending question\n";
  return exit_code::kProvider;
}

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive tutor: practice a topic until mastery"};
  CliConfig config;
  std::string mode = "interactive";
  std::string output;
  std::string server;
  std::string script;
  std::string answers;
  std::string config_file;
  std::string data_dir;

  app.add_option("--topic", config.topic, "Topic to practice");
  app.add_option("--mode", mode, "interactive or replay")->check(CLI::IsMember({"interactive", "replay"}));
  app.add_option("--server", server, "Base URL of a running tutor server");
  app.add_flag("--embedded", config.embedded, "Run the engine in-process (default without --server)");
  app.add_option("--script", script, "Completion script for the scripted provider");
  app.add_option("--answers", answers, "Student answers, one per line (replay mode)");
  app.add_option("--output", output, "plain or structured")->check(CLI::IsMember({"plain", "structured"}));
  app.add_option("--config", config_file, "Key-value config file");
  app.add_option("--data-dir", data_dir, "Directory for session event logs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::kOk : exit_code::kUsage;
  }

  config.mode = mode == "replay" ? CliMode::Replay : CliMode::Interactive;
  if (!output.empty()) config.output = output == "structured" ? OutputFormat::Structured : OutputFormat::Plain;
  if (!server.empty()) config.server_url = server;
  if (!script.empty()) config.script_path = script;
  if (!answers.empty()) config.answers_path = answers;
  if (!config_file.empty()) config.config_path = config_file;
  if (!data_dir.empty()) config.data_dir = data_dir;

  std::unique_ptr<TutorClient> client;
  try {
    config.validate();
    if (config.server_url) {
      client = std::make_unique<RemoteClient>(*config.server_url);
    } else {
      TutorConfig engine = config.config_path ? load_config(*config.config_path) : TutorConfig{};
      apply_environment(engine);
      if (config.script_path) {
        engine.provider = ProviderKind::Scripted;
        engine.script_path = config.script_path;
      }
      if (config.data_dir) engine.data_dir = config.data_dir;
      SessionService::IdGenerator ids;
      if (config.mode == CliMode::Replay) {
        ids = [n = 0]() mutable { return "replay-" + std::to_string(++n); };
      }
      client = std::make_unique<EmbeddedClient>(make_service(engine, std::move(ids)));
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kUsage;
  }

  if (config.mode == CliMode::Replay) return run_replay(*client, config, out, err);
  return run_interactive(*client, config, in, out, err);
}

}  // namespace tutor
