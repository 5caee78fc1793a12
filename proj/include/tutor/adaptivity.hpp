#pragma once

#include "tutor/domain.hpp"

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace tutor {

struct AdaptivityPolicy {
  int raise_threshold = 8;
  int lower_threshold = 4;
  int mastery_streak = 3;
  int required_transfer_passes = 2;
  int transfer_pass_score = 7;
  std::vector<std::string> transfer_domains = {"art", "history", "engineering", "everyday life", "sports"};

  // Throws ValidationError when thresholds or counts are out of range.
  void validate() const;

  // Turns an always-perfect student needs to reach mastery from level 1.
  int perfect_run_turns() const noexcept {
    return (DifficultyLevel::kMax - DifficultyLevel::kMin) + mastery_streak + required_transfer_passes - 1;
  }

  friend bool operator==(const AdaptivityPolicy&, const AdaptivityPolicy&) = default;
};

struct TurnOutcome {
  int score = 0;
  bool was_transfer = false;
  std::optional<std::string> transfer_domain;  // present iff was_transfer

  static TurnOutcome from_turn(const TurnRecord& turn);
};

struct ExhaustedDomains : std::runtime_error {
  ExhaustedDomains() : std::runtime_error("every transfer domain in the policy has been used") {}
};

struct TutorAction {
  enum class Type { AskQuestion, AskTransfer, DeclareMastery };

  Type type = Type::AskQuestion;
  DifficultyLevel difficulty;
  QuestionKind kind = QuestionKind::MultipleChoice;  // AskQuestion only
  std::string domain;                                // AskTransfer only

  static TutorAction ask_question(DifficultyLevel level, QuestionKind kind) {
    return {Type::AskQuestion, level, kind, {}};
  }
  static TutorAction ask_transfer(DifficultyLevel level, std::string domain) {
    return {Type::AskTransfer, level, QuestionKind::Transfer, std::move(domain)};
  }
  static TutorAction declare_mastery(DifficultyLevel level) {
    return {Type::DeclareMastery, level, QuestionKind::MultipleChoice, {}};
  }

  friend bool operator==(const TutorAction&, const TutorAction&) = default;
};

DifficultyLevel next_difficulty(DifficultyLevel current, int score, const AdaptivityPolicy& policy);

// Multiple choice at levels 1-2, short answer from level 3 up.
QuestionKind question_kind_for(DifficultyLevel level) noexcept;

std::string pick_transfer_domain(const AdaptivityPolicy& policy, const std::set<std::string>& used);

// Requires a state without a pending question.
TutorAction select_next_action(const SessionState& state, const AdaptivityPolicy& policy);

// The adaptation events that follow the evaluation of the state's last turn:
// difficulty, streak, transfer pass and phase changes, in that order.
//
// The streak counts consecutive high scores at the current level and restarts
// whenever the level changes; the turn that raises the level counts as the
// first high score at the new level.
std::vector<SessionEvent> adaptation_events(const SessionState& state, const TurnOutcome& outcome,
                                            const AdaptivityPolicy& policy, Timestamp at);

SessionState update_after_turn(SessionState state, const TurnOutcome& outcome, const AdaptivityPolicy& policy);

}  // namespace tutor
