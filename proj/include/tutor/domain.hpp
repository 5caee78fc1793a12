#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tutor {

// Raised when a domain value is constructed outside its invariants.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Milliseconds since the Unix epoch. Events carry the instant they were
// recorded so that replaying a log reproduces the same turn timestamps.
using Timestamp = std::int64_t;

class Topic {
public:
  static constexpr std::size_t kMaxLength = 200;

  // Trims surrounding whitespace; throws ValidationError when the result is
  // empty or longer than kMaxLength.
  explicit Topic(std::string_view text);

  const std::string& text() const noexcept { return text_; }

  friend bool operator==(const Topic&, const Topic&) = default;

private:
  std::string text_;
};

class DifficultyLevel {
public:
  static constexpr int kMin = 1;
  static constexpr int kMax = 5;

  constexpr DifficultyLevel() = default;
  explicit DifficultyLevel(int level);

  constexpr int value() const noexcept { return level_; }
  constexpr bool is_max() const noexcept { return level_ == kMax; }

  friend constexpr auto operator<=>(const DifficultyLevel&, const DifficultyLevel&) = default;

private:
  int level_ = kMin;
};

enum class QuestionKind { MultipleChoice, ShortAnswer, Transfer };

std::string_view to_string(QuestionKind kind) noexcept;
QuestionKind question_kind_from_string(std::string_view name);

inline constexpr std::array<char, 4> kOptionLabels = {'A', 'B', 'C', 'D'};

struct Option {
  char label = 'A';
  std::string text;

  friend bool operator==(const Option&, const Option&) = default;
};

struct Question {
  std::string id;
  QuestionKind kind = QuestionKind::MultipleChoice;
  std::string stem;
  std::vector<Option> options;              // MultipleChoice only
  std::optional<char> correct_label;        // MultipleChoice only
  std::optional<std::string> reference_answer;  // ShortAnswer and Transfer
  DifficultyLevel difficulty;
  std::optional<std::string> transfer_domain;   // Transfer only

  friend bool operator==(const Question&, const Question&) = default;
};

// Throws ValidationError when the question breaks the per-kind field rules.
void validate(const Question& question);

struct Evaluation {
  int score = 0;  // out of 10
  std::string feedback;
  std::optional<std::string> hint;

  friend bool operator==(const Evaluation&, const Evaluation&) = default;
};

void validate(const Evaluation& evaluation);

struct TurnRecord {
  Question question;
  std::string student_answer;
  Evaluation evaluation;
  Timestamp timestamp = 0;

  friend bool operator==(const TurnRecord&, const TurnRecord&) = default;
};

enum class Phase { Practicing, Transferring, Mastered };

std::string_view to_string(Phase phase) noexcept;
Phase phase_from_string(std::string_view name);

struct SessionState {
  std::string session_id;
  std::optional<Topic> topic;  // empty only before SessionCreated
  DifficultyLevel difficulty;
  std::vector<TurnRecord> turns;
  std::optional<Question> pending_question;
  // Answer received for the pending question, awaiting its evaluation.
  std::optional<std::string> pending_answer;
  int consecutive_high_scores = 0;
  std::set<std::string> transfer_passes;
  Phase phase = Phase::Practicing;

  bool created() const noexcept { return topic.has_value(); }
  // True between a committed evaluation and the next posed question, the only
  // window in which adaptation events are legal.
  bool awaiting_adaptation() const noexcept {
    return !turns.empty() && !pending_question && !pending_answer;
  }

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

// Transfer domains already used by the session: passed ones, every answered
// transfer question and the pending one.
std::set<std::string> used_transfer_domains(const SessionState& state);

namespace event {

struct SessionCreated {
  std::string session_id;
  std::string topic;
  friend bool operator==(const SessionCreated&, const SessionCreated&) = default;
};
struct QuestionPosed {
  Question question;
  friend bool operator==(const QuestionPosed&, const QuestionPosed&) = default;
};
struct AnswerSubmitted {
  std::string text;
  friend bool operator==(const AnswerSubmitted&, const AnswerSubmitted&) = default;
};
struct Evaluated {
  Evaluation evaluation;
  friend bool operator==(const Evaluated&, const Evaluated&) = default;
};
struct PhaseChanged {
  Phase phase;
  friend bool operator==(const PhaseChanged&, const PhaseChanged&) = default;
};
struct DifficultyChanged {
  DifficultyLevel level;
  friend bool operator==(const DifficultyChanged&, const DifficultyChanged&) = default;
};
struct StreakChanged {
  int count = 0;
  friend bool operator==(const StreakChanged&, const StreakChanged&) = default;
};
struct TransferPassed {
  std::string domain;
  friend bool operator==(const TransferPassed&, const TransferPassed&) = default;
};

}  // namespace event

using EventPayload = std::variant<event::SessionCreated, event::QuestionPosed,
                                  event::AnswerSubmitted, event::Evaluated,
                                  event::PhaseChanged, event::DifficultyChanged,
                                  event::StreakChanged, event::TransferPassed>;

struct SessionEvent {
  EventPayload payload;
  Timestamp at = 0;

  friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

std::string_view event_name(const SessionEvent& event) noexcept;

struct IllegalTransition : std::logic_error {
  IllegalTransition(std::string message, std::optional<std::size_t> index = std::nullopt);
  // Position of the offending event when raised by replay().
  std::optional<std::size_t> index;
};

SessionState apply_event(SessionState state, const SessionEvent& event);

// Left fold of apply_event from the empty state. The first event must be
// SessionCreated.
SessionState replay(const std::vector<SessionEvent>& events);

}  // namespace tutor
