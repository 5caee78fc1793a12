#pragma once

#include "tutor/adaptivity.hpp"
#include "tutor/domain.hpp"
#include "tutor/event_store.hpp"
#include "tutor/llm_gateway.hpp"
#include "tutor/prompt_forge.hpp"
#include "tutor/response_parser.hpp"

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace tutor {

enum class ErrorCode {
  Validation,
  EmptyAnswer,
  InvalidAnswer,
  UnknownSession,
  NoPendingQuestion,
  QuestionPending,
  Conflict,
  ProviderUnavailable,
  GenerationUnparseable,
  EvaluationUnparseable,
  ExhaustedDomains,
  Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

struct ServiceError : std::runtime_error {
  ServiceError(ErrorCode code, const std::string& message);

  ErrorCode code;
  std::optional<ParseFailure> failure;  // set for the *Unparseable codes
  std::string session_id;               // set when a session exists despite the error
};

struct RepairBudgetExhausted : std::runtime_error {
  RepairBudgetExhausted() : std::runtime_error("repair budget exhausted") {}
};

inline constexpr int kRepairBudget = 2;

// Corrective prompt for a completion that failed to parse as `expected`.
// `attempt_index` counts from 1; beyond kRepairBudget it throws
// RepairBudgetExhausted.
PromptText repair_completion(const ParseFailure& failure, std::string_view original, BlockKind expected,
                             int attempt_index);

struct RepairAttempt {
  std::string original_completion;
  ParseFailure failure;
  PromptText repair_prompt;
  int attempt_index = 1;
};

struct SessionView {
  std::string session_id;
  std::string topic;
  std::optional<Question> pending_question;  // serialized redacted
  DifficultyLevel difficulty;
  Phase phase = Phase::Practicing;
  std::size_t turn_count = 0;

  static SessionView of(const SessionState& state);
};

struct TurnResult {
  Evaluation evaluation;
  std::optional<Question> next_question;  // serialized redacted; empty once mastered
  DifficultyLevel difficulty_after;
  Phase phase_after = Phase::Practicing;
};

struct EventMeta {
  std::size_t index = 0;
  std::string type;
  Timestamp at = 0;
};

struct Transcript {
  std::string session_id;
  std::string topic;
  std::vector<TurnRecord> turns;
  std::optional<Question> pending_question;  // serialized redacted
  std::vector<EventMeta> events;
};

// Multiple-choice answers are graded locally: the option label (or the
// option's exact text) scores 10 when it matches the marked answer, else 0.
// Throws ServiceError(InvalidAnswer) for anything else.
std::pair<std::string, Evaluation> grade_choice(const Question& question, std::string_view answer);

class SessionService {
public:
  using Clock = std::function<Timestamp()>;
  using IdGenerator = std::function<std::string()>;

  struct Dependencies {
    std::shared_ptr<CompletionProvider> provider;
    std::shared_ptr<EventStore> store;
    PromptForge forge;
    AdaptivityPolicy policy;
    Clock clock;            // defaults to the system clock
    IdGenerator next_id;    // defaults to random hex ids
  };

  explicit SessionService(Dependencies deps);

  // Rebuilds every session from the store's logs.
  void recover();

  SessionView create_session(std::string_view topic);
  // `expected_question_id`, when given, must name the pending question;
  // otherwise the call is rejected with Conflict.
  TurnResult submit_answer(const std::string& session_id, std::string_view answer,
                           std::optional<std::string> expected_question_id = std::nullopt);
  // Generates a question for a session left without one by a failed generation.
  SessionView retry_question(const std::string& session_id);

  SessionView get_session(const std::string& session_id) const;
  Transcript get_transcript(const std::string& session_id) const;
  SessionState state(const std::string& session_id) const;
  std::vector<RepairAttempt> repair_log(const std::string& session_id) const;
  std::vector<std::string> session_ids() const;

  const CompletionProvider& provider() const noexcept { return *deps_.provider; }
  const AdaptivityPolicy& policy() const noexcept { return deps_.policy; }

private:
  struct Slot {
    std::mutex writer;  // one in-flight mutation per session
    mutable std::mutex committed_mutex;
    SessionState committed;
    std::vector<SessionEvent> log;
    std::vector<RepairAttempt> repairs;
  };

  std::shared_ptr<Slot> find(const std::string& session_id) const;
  void commit(Slot& slot, const std::string& session_id, std::vector<SessionEvent> batch, SessionState next);

  std::string complete_text(const PromptText& prompt, double temperature);
  template <typename Parse>
  auto complete_and_parse(PromptText prompt, double temperature, BlockKind expected, Parse parse,
                          std::vector<RepairAttempt>& repairs, ErrorCode on_failure);

  Question generate_question(const SessionState& state, const TutorAction& action,
                             std::vector<RepairAttempt>& repairs);
  Evaluation evaluate(const Question& question, std::string& answer, std::vector<RepairAttempt>& repairs);

  Dependencies deps_;
  mutable std::shared_mutex sessions_mutex_;
  std::unordered_map<std::string, std::shared_ptr<Slot>> sessions_;
};

}  // namespace tutor
