#include "tutor/adaptivity.hpp"

#include "tutor/text.hpp"

#include <algorithm>

namespace tutor {

void AdaptivityPolicy::validate() const {
  auto is_score = [](int s) { return s >= 0 && s <= 10; };
  if (!is_score(lower_threshold) || !is_score(raise_threshold) || lower_threshold >= raise_threshold) {
    throw ValidationError("policy thresholds must satisfy 0 <= lower < raise <= 10");
  }
  if (!is_score(transfer_pass_score)) throw ValidationError("transfer pass score outside [0, 10]");
  if (mastery_streak < 1 || required_transfer_passes < 1) {
    throw ValidationError("mastery streak and required transfer passes must be at least 1");
  }
  if (transfer_domains.empty()) throw ValidationError("policy needs at least one transfer domain");
  std::set<std::string> seen;
  for (const auto& domain : transfer_domains) {
    if (trim(domain).empty()) throw ValidationError("transfer domains must not be blank");
    if (!seen.insert(domain).second) throw ValidationError("duplicate transfer domain '" + domain + "'");
  }
}

TurnOutcome TurnOutcome::from_turn(const TurnRecord& turn) {
  TurnOutcome outcome;
  outcome.score = turn.evaluation.score;
  outcome.was_transfer = turn.question.kind == QuestionKind::Transfer;
  outcome.transfer_domain = turn.question.transfer_domain;
  return outcome;
}

DifficultyLevel next_difficulty(DifficultyLevel current, int score, const AdaptivityPolicy& policy) {
  if (score >= policy.raise_threshold) {
    return DifficultyLevel(std::min(current.value() + 1, DifficultyLevel::kMax));
  }
  if (score <= policy.lower_threshold) {
    return DifficultyLevel(std::max(current.value() - 1, DifficultyLevel::kMin));
  }
  return current;
}

QuestionKind question_kind_for(DifficultyLevel level) noexcept {
  return level.value() <= 2 ? QuestionKind::MultipleChoice : QuestionKind::ShortAnswer;
}

std::string pick_transfer_domain(const AdaptivityPolicy& policy, const std::set<std::string>& used) {
  for (const auto& domain : policy.transfer_domains) {
    if (!used.contains(domain)) return domain;
  }
  throw ExhaustedDomains();
}

TutorAction select_next_action(const SessionState& state, const AdaptivityPolicy& policy) {
  if (state.pending_question) {
    throw std::logic_error("select_next_action called while a question is pending");
  }
  switch (state.phase) {
    case Phase::Mastered:
      return TutorAction::declare_mastery(state.difficulty);
    case Phase::Transferring:
      if (static_cast<int>(state.transfer_passes.size()) >= policy.required_transfer_passes) {
        return TutorAction::declare_mastery(state.difficulty);
      }
      return TutorAction::ask_transfer(state.difficulty, pick_transfer_domain(policy, used_transfer_domains(state)));
    case Phase::Practicing:
      break;
  }
  if (state.difficulty.is_max() && state.consecutive_high_scores >= policy.mastery_streak) {
    return TutorAction::ask_transfer(state.difficulty, pick_transfer_domain(policy, used_transfer_domains(state)));
  }
  return TutorAction::ask_question(state.difficulty, question_kind_for(state.difficulty));
}

std::vector<SessionEvent> adaptation_events(const SessionState& state, const TurnOutcome& outcome,
                                            const AdaptivityPolicy& policy, Timestamp at) {
  if (outcome.score < 0 || outcome.score > 10) throw std::invalid_argument("turn score outside [0, 10]");
  if (outcome.was_transfer != (state.phase == Phase::Transferring)) {
    throw std::invalid_argument("turn outcome does not match the session phase");
  }
  std::vector<SessionEvent> events;
  if (state.phase == Phase::Mastered) return events;

  const DifficultyLevel current = state.difficulty;
  const int streak = state.consecutive_high_scores;

  if (!outcome.was_transfer) {
    const DifficultyLevel level = next_difficulty(current, outcome.score, policy);
    int new_streak = 0;
    if (level != current) {
      events.push_back({event::DifficultyChanged{level}, at});
      new_streak = level > current ? 1 : 0;
    } else {
      new_streak = outcome.score >= policy.raise_threshold ? streak + 1 : 0;
    }
    if (new_streak != streak) events.push_back({event::StreakChanged{new_streak}, at});
    if (level.is_max() && new_streak >= policy.mastery_streak) {
      events.push_back({event::PhaseChanged{Phase::Transferring}, at});
    }
    return events;
  }

  if (!outcome.transfer_domain) throw std::invalid_argument("transfer outcome without a domain");
  if (outcome.score >= policy.transfer_pass_score) {
    events.push_back({event::TransferPassed{*outcome.transfer_domain}, at});
    auto passes = state.transfer_passes;
    passes.insert(*outcome.transfer_domain);
    if (static_cast<int>(passes.size()) >= policy.required_transfer_passes) {
      events.push_back({event::PhaseChanged{Phase::Mastered}, at});
    }
    return events;
  }

  const DifficultyLevel lowered(std::max(current.value() - 1, DifficultyLevel::kMin));
  if (lowered != current) events.push_back({event::DifficultyChanged{lowered}, at});
  if (streak != 0) events.push_back({event::StreakChanged{0}, at});
  events.push_back({event::PhaseChanged{Phase::Practicing}, at});
  return events;
}

SessionState update_after_turn(SessionState state, const TurnOutcome& outcome, const AdaptivityPolicy& policy) {
  const Timestamp at = state.turns.empty() ? 0 : state.turns.back().timestamp;
  for (const auto& ev : adaptation_events(state, outcome, policy, at)) {
    state = apply_event(std::move(state), ev);
  }
  return state;
}

}  // namespace tutor
