#include "golden.hpp"
#include "helpers.hpp"
#include "tutor/cli.hpp"

#include <doctest.h>

#include <cstdio>
#include <sstream>

using namespace tutor;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "tutor-cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out;
  std::ostringstream err;
  CliRun result;
  result.code = run_cli(static_cast<int>(argv.size()), argv.data(), in, out, err);
  result.out = out.str();
  result.err = err.str();
  return result;
}

std::vector<std::string> replay_args(const std::string& script, const std::string& answers) {
  return {"--mode", "replay", "--topic", "photosynthesis", "--script", test::fixture_path(script).string(),
          "--answers", test::fixture_path(answers).string()};
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

// Runs the built binary through the shell and captures stdout.
CliRun run_binary(const std::string& args) {
  CliRun result;
  const std::string command = std::string(TUTOR_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) result.out.append(buf, n);
  const int status = ::pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

}  // namespace

TEST_CASE("interactive session on the photosynthesis script") {
  auto r = run({"--topic", "photosynthesis", "--script", test::fixture_path("photosynthesis_session.script").string()},
               "D\n\nD\nPhotosynthesis is when plants make food from sunlight.\n");
  CHECK(r.code == 0);
  CHECK(r.out.find("Session ") == 0);
  CHECK(r.out.find("Question 1 (level 1/5, multiple choice)") != std::string::npos);
  CHECK(r.out.find("Question 3 (level 3/5, short answer)") != std::string::npos);
  CHECK(r.out.find("D) Kinetic energy") != std::string::npos);
  CHECK(r.out.find("Score: 7/10") != std::string::npos);
  CHECK(r.out.find("Hint: ") != std::string::npos);
  CHECK(r.out.find("Session saved (") != std::string::npos);
  CHECK(r.out.find("3 turns") != std::string::npos);
  CHECK(r.err.empty());
}

TEST_CASE("interactive prompts for a topic") {
  auto r = run({"--script", test::fixture_path("photosynthesis_session.script").string()}, "photosynthesis\nD\n");
  CHECK(r.code == 0);
  CHECK(r.out.find("Topic: ") == 0);
  CHECK(r.out.find("Score: 10/10") != std::string::npos);
}

TEST_CASE("end of input right away saves an empty session") {
  test::TempDir dir;
  auto r = run({"--topic", "photosynthesis", "--script", test::fixture_path("photosynthesis_session.script").string(),
                "--data-dir", dir.path().string()},
               "");
  CHECK(r.code == 0);
  CHECK(r.out.find("0 turns") != std::string::npos);
  std::size_t logs = 0;
  for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(dir.path())) ++logs;
  CHECK(logs == 1);
}

TEST_CASE("interactive re-prompts after an invalid choice") {
  auto r = run({"--topic", "photosynthesis", "--script", test::fixture_path("photosynthesis_session.script").string()},
               "Z\nD\n");
  CHECK(r.code == 0);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK(r.out.find("Score: 10/10") != std::string::npos);
  CHECK(count(r.out, "Question 1 ") == 2);
  CHECK(count(r.out, "Score: ") == 1);
}

TEST_CASE("a perfect student piped through interactive mode reaches mastery") {
  auto r = run({"--topic", "photosynthesis", "--script", test::fixture_path("perfect_student.script").string()},
               test::fixture("perfect_student.answers"));
  CHECK(r.code == 0);
  CHECK(r.out.find("*** Mastery reached: photosynthesis after 8 turns ***") != std::string::npos);
  CHECK(count(r.out, "Score: ") == 8);
  CHECK(r.out.find("transfer: art") != std::string::npos);
}

TEST_CASE("replay of the perfect student matches the golden transcript") {
  auto r = run(replay_args("perfect_student.script", "perfect_student.answers"));
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  test::check_golden("replay_perfect_student.jsonl", r.out);
  CHECK(count(r.out, "\"type\":\"turn\"") == 8);
  CHECK(r.out.find("{\"type\":\"mastery\",\"topic\":\"photosynthesis\",\"turns\":8}") != std::string::npos);
}

TEST_CASE("replay is byte-identical across runs") {
  auto first = run(replay_args("perfect_student.script", "perfect_student.answers"));
  auto second = run(replay_args("perfect_student.script", "perfect_student.answers"));
  CHECK(first.out == second.out);
  auto plain_a = run([] {
    auto a = replay_args("photosynthesis_session.script", "perfect_student.answers");
    a.insert(a.end(), {"--output", "plain"});
    return a;
  }());
  auto plain_b = run([] {
    auto a = replay_args("photosynthesis_session.script", "perfect_student.answers");
    a.insert(a.end(), {"--output", "plain"});
    return a;
  }());
  CHECK(plain_a.out == plain_b.out);
}

TEST_CASE("replay with too few answers stops with a partial transcript") {
  test::TempDir dir;
  auto answers = test::fixture("perfect_student.answers");
  test::write_file(dir.path() / "short.answers", answers.substr(0, answers.find('\n', answers.find('\n') + 1) + 1));
  auto args = replay_args("perfect_student.script", "perfect_student.answers");
  args[7] = (dir.path() / "short.answers").string();
  auto r = run(args);
  CHECK(r.code == exit_code::kUsage);
  CHECK(count(r.out, "\"type\":\"turn\"") == 2);
  CHECK(r.out.find("\"type\":\"incomplete\"") != std::string::npos);
  CHECK(r.out.find("correct_label") == std::string::npos);
  CHECK(r.err.find("answers file ended after 2 turns") != std::string::npos);
}

TEST_CASE("provider failures map to exit codes") {
  auto photosynthesis = replay_args("photosynthesis_session.script", "perfect_student.answers");
  auto r = run(photosynthesis);
  CHECK(r.code == exit_code::kProvider);
  CHECK(r.out.find("\"code\":\"ProviderUnavailable\"") != std::string::npos);

  test::TempDir dir;
  test::write_file(dir.path() / "garbage.script", "nonsense\n---\nnonsense\n---\nnonsense\n");
  auto args = replay_args("perfect_student.script", "perfect_student.answers");
  args[5] = (dir.path() / "garbage.script").string();
  r = run(args);
  CHECK(r.code == exit_code::kParse);
  CHECK(r.out.find("GenerationUnparseable") != std::string::npos);
}

TEST_CASE("exit codes for error bodies") {
  auto body = [](const char* code) { return Json{{"error", {{"code", code}}}}; };
  CHECK(exit_code_for(body("GenerationUnparseable"), 502) == 3);
  CHECK(exit_code_for(body("EvaluationUnparseable"), 502) == 3);
  CHECK(exit_code_for(body("ProviderUnavailable"), 502) == 2);
  CHECK(exit_code_for(body("Unreachable"), 0) == 2);
  CHECK(exit_code_for(body("Internal"), 500) == 2);
  CHECK(exit_code_for(body("Validation"), 422) == 1);
  CHECK(exit_code_for(body("UnknownSession"), 404) == 1);
}

TEST_CASE("inconsistent flags are usage errors") {
  CHECK(run({"--server", "http://localhost:1", "--embedded"}).code == 1);
  CHECK(run({"--mode", "replay", "--topic", "x"}).code == 1);
  CHECK(run({"--server", "http://localhost:1", "--script", "x.script"}).code == 1);
  CHECK(run({"--mode", "sideways"}).code == 1);
  CHECK(run({"--topic", "photosynthesis", "--script", "/nonexistent.script"}).code == 1);
}

TEST_CASE("an unreachable server is a provider-class failure") {
  auto r = run({"--server", "http://127.0.0.1:1", "--topic", "photosynthesis"});
  CHECK(r.code == exit_code::kProvider);
}

TEST_CASE("the built binary replays the golden transcript") {
  auto r = run_binary("--mode replay --topic photosynthesis --script " +
                      test::fixture_path("perfect_student.script").string() + " --answers " +
                      test::fixture_path("perfect_student.answers").string());
  CHECK(r.code == 0);
  CHECK(r.out == test::fixture("golden/replay_perfect_student.jsonl"));
}
