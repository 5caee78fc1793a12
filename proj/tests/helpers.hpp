#pragma once

#include "tutor/api.hpp"
#include "tutor/session_service.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include <unistd.h>

namespace test {

inline std::filesystem::path fixture_path(const std::string& name) { return std::filesystem::path(TUTOR_FIXTURES) / name; }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string fixture(const std::string& name) { return read_file(fixture_path(name)); }

inline void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("tutor-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

inline tutor::Question mcq(std::string stem = "Which gas do plants absorb?", char correct = 'C', int level = 1) {
  tutor::Question q;
  q.id = "q1";
  q.kind = tutor::QuestionKind::MultipleChoice;
  q.stem = std::move(stem);
  q.options = {{'A', "Oxygen"}, {'B', "Nitrogen"}, {'C', "Carbon dioxide"}, {'D', "Helium"}};
  q.correct_label = correct;
  q.difficulty = tutor::DifficultyLevel(level);
  return q;
}

inline tutor::Question short_answer(std::string stem = "What is photosynthesis?", int level = 3) {
  tutor::Question q;
  q.id = "q1";
  q.kind = tutor::QuestionKind::ShortAnswer;
  q.stem = std::move(stem);
  q.reference_answer = "Turning light energy into chemical energy.";
  q.difficulty = tutor::DifficultyLevel(level);
  return q;
}

inline tutor::Question transfer(std::string domain = "art", int level = 5) {
  tutor::Question q;
  q.id = "q1";
  q.kind = tutor::QuestionKind::Transfer;
  q.stem = "How is photosynthesis like painting?";
  q.reference_answer = "Both transform light.";
  q.difficulty = tutor::DifficultyLevel(level);
  q.transfer_domain = std::move(domain);
  return q;
}

// Counter-based ids and clock so that runs are reproducible.
inline tutor::SessionService::Dependencies deterministic_deps(std::shared_ptr<tutor::CompletionProvider> provider,
                                                              std::shared_ptr<tutor::EventStore> store = nullptr) {
  tutor::SessionService::Dependencies deps;
  deps.provider = std::move(provider);
  deps.store = store ? std::move(store) : std::make_shared<tutor::MemoryEventStore>();
  deps.next_id = [n = 0]() mutable { return "s" + std::to_string(++n); };
  deps.clock = [t = tutor::Timestamp{1'700'000'000'000}]() mutable { return t += 1000; };
  return deps;
}

inline std::shared_ptr<tutor::SessionService> scripted_service(const std::string& script_fixture,
                                                               std::shared_ptr<tutor::EventStore> store = nullptr) {
  auto provider = tutor::load_script(fixture_path(script_fixture));
  return std::make_shared<tutor::SessionService>(deterministic_deps(provider, std::move(store)));
}

inline std::vector<std::string> answer_lines(const std::string& fixture_name) {
  std::vector<std::string> out;
  std::istringstream in(fixture(fixture_name));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace test

namespace test {

// Feeds answers in order until the session is mastered or the answers run
// out. Returns the number of turns played.
inline std::size_t play_answers(tutor::SessionService& service, const std::string& session_id,
                                const std::vector<std::string>& answers) {
  std::size_t played = 0;
  for (const auto& answer : answers) {
    auto result = service.submit_answer(session_id, answer);
    ++played;
    if (!result.next_question) break;
  }
  return played;
}

// Completion provider that always serves the same multiple-choice block
// (correct answer D), optionally pausing to widen race windows.
class FixedMcqProvider final : public tutor::CompletionProvider {
public:
  explicit FixedMcqProvider(std::chrono::microseconds pause = {}) : pause_(pause) {}
  tutor::CompletionResult complete(const tutor::CompletionRequest& request) override {
    request.validate();
    if (pause_.count() > 0) std::this_thread::sleep_for(pause_);
    ++calls;
    return {"Q1: Which pigment absorbs light? A) Keratin B) Melanin C) Hemoglobin D) Chlorophyll*", id(), {}, 1};
  }
  std::string id() const override { return "fixed-mcq"; }

  std::atomic<int> calls{0};

private:
  std::chrono::microseconds pause_;
};

}  // namespace test
