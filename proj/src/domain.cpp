#include "tutor/domain.hpp"

#include "tutor/text.hpp"

#include <algorithm>
#include <cstdlib>

namespace tutor {

Topic::Topic(std::string_view text) : text_(trim(text)) {
  if (text_.empty()) {
    throw ValidationError("topic must not be empty");
  }
  if (text_.size() > kMaxLength) {
    throw ValidationError("topic exceeds " + std::to_string(kMaxLength) + " characters");
  }
}

DifficultyLevel::DifficultyLevel(int level) : level_(level) {
  if (level < kMin || level > kMax) {
    throw ValidationError("difficulty level " + std::to_string(level) + " outside [1, 5]");
  }
}

std::string_view to_string(QuestionKind kind) noexcept {
  switch (kind) {
    case QuestionKind::MultipleChoice: return "multiple_choice";
    case QuestionKind::ShortAnswer: return "short_answer";
    case QuestionKind::Transfer: return "transfer";
  }
  return "unknown";
}

QuestionKind question_kind_from_string(std::string_view name) {
  if (name == "multiple_choice") return QuestionKind::MultipleChoice;
  if (name == "short_answer") return QuestionKind::ShortAnswer;
  if (name == "transfer") return QuestionKind::Transfer;
  throw ValidationError("unknown question kind '" + std::string(name) + "'");
}

std::string_view to_string(Phase phase) noexcept {
  switch (phase) {
    case Phase::Practicing: return "practicing";
    case Phase::Transferring: return "transferring";
    case Phase::Mastered: return "mastered";
  }
  return "unknown";
}

Phase phase_from_string(std::string_view name) {
  if (name == "practicing") return Phase::Practicing;
  if (name == "transferring") return Phase::Transferring;
  if (name == "mastered") return Phase::Mastered;
  throw ValidationError("unknown phase '" + std::string(name) + "'");
}

void validate(const Question& q) {
  if (trim(q.stem).empty()) {
    throw ValidationError("question stem must not be empty");
  }
  const bool mcq = q.kind == QuestionKind::MultipleChoice;
  if (mcq) {
    if (q.options.size() != kOptionLabels.size()) {
      throw ValidationError("multiple-choice question needs exactly 4 options");
    }
    for (std::size_t i = 0; i < kOptionLabels.size(); ++i) {
      if (q.options[i].label != kOptionLabels[i]) {
        throw ValidationError("options must be labelled A-D in order");
      }
    }
    if (!q.correct_label ||
        std::find(kOptionLabels.begin(), kOptionLabels.end(), *q.correct_label) == kOptionLabels.end()) {
      throw ValidationError("multiple-choice question needs a correct label among A-D");
    }
    if (q.reference_answer) {
      throw ValidationError("multiple-choice question carries no reference answer");
    }
  } else {
    if (!q.options.empty() || q.correct_label) {
      throw ValidationError("only multiple-choice questions carry options");
    }
    if (!q.reference_answer) {
      throw ValidationError("short-answer and transfer questions need a reference answer");
    }
  }
  if (q.kind == QuestionKind::Transfer) {
    if (!q.transfer_domain || trim(*q.transfer_domain).empty()) {
      throw ValidationError("transfer question needs a target domain");
    }
  } else if (q.transfer_domain) {
    throw ValidationError("only transfer questions carry a target domain");
  }
}

void validate(const Evaluation& e) {
  if (e.score < 0 || e.score > 10) {
    throw ValidationError("score " + std::to_string(e.score) + " outside [0, 10]");
  }
  if (trim(e.feedback).empty()) {
    throw ValidationError("feedback must not be empty");
  }
}

std::set<std::string> used_transfer_domains(const SessionState& state) {
  std::set<std::string> used = state.transfer_passes;
  for (const auto& turn : state.turns) {
    if (turn.question.transfer_domain) used.insert(*turn.question.transfer_domain);
  }
  if (state.pending_question && state.pending_question->transfer_domain) {
    used.insert(*state.pending_question->transfer_domain);
  }
  return used;
}

std::string_view event_name(const SessionEvent& event) noexcept {
  struct Namer {
    std::string_view operator()(const event::SessionCreated&) const { return "SessionCreated"; }
    std::string_view operator()(const event::QuestionPosed&) const { return "QuestionPosed"; }
    std::string_view operator()(const event::AnswerSubmitted&) const { return "AnswerSubmitted"; }
    std::string_view operator()(const event::Evaluated&) const { return "Evaluated"; }
    std::string_view operator()(const event::PhaseChanged&) const { return "PhaseChanged"; }
    std::string_view operator()(const event::DifficultyChanged&) const { return "DifficultyChanged"; }
    std::string_view operator()(const event::StreakChanged&) const { return "StreakChanged"; }
    std::string_view operator()(const event::TransferPassed&) const { return "TransferPassed"; }
  };
  return std::visit(Namer{}, event.payload);
}

IllegalTransition::IllegalTransition(std::string message, std::optional<std::size_t> at)
    : std::logic_error(std::move(message)), index(at) {}

namespace {

void require(bool condition, const SessionEvent& event, std::string_view why) {
  if (!condition) {
    throw IllegalTransition(std::string(event_name(event)) + ": " + std::string(why));
  }
}

bool phase_step_allowed(Phase from, Phase to) {
  switch (from) {
    case Phase::Practicing: return to == Phase::Transferring;
    case Phase::Transferring: return to == Phase::Practicing || to == Phase::Mastered;
    case Phase::Mastered: return false;
  }
  return false;
}

}  // namespace

SessionState apply_event(SessionState state, const SessionEvent& ev) {
  if (!std::holds_alternative<event::SessionCreated>(ev.payload)) {
    require(state.created(), ev, "session not created");
    require(state.phase != Phase::Mastered, ev, "session already mastered");
  }

  std::visit(
      [&](const auto& e) {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, event::SessionCreated>) {
          require(!state.created(), ev, "session already created");
          require(!e.session_id.empty(), ev, "empty session id");
          try {
            state.topic = Topic(e.topic);
          } catch (const ValidationError& err) {
            throw IllegalTransition("SessionCreated: " + std::string(err.what()));
          }
          state.session_id = e.session_id;
          state.difficulty = DifficultyLevel{};
          state.phase = Phase::Practicing;
        } else if constexpr (std::is_same_v<E, event::QuestionPosed>) {
          require(!state.pending_question && !state.pending_answer, ev, "a question is already pending");
          try {
            validate(e.question);
          } catch (const ValidationError& err) {
            throw IllegalTransition("QuestionPosed: " + std::string(err.what()));
          }
          require(e.question.difficulty == state.difficulty, ev, "question difficulty differs from session");
          require((e.question.kind == QuestionKind::Transfer) == (state.phase == Phase::Transferring), ev,
                  "transfer questions are posed exactly while transferring");
          state.pending_question = e.question;
        } else if constexpr (std::is_same_v<E, event::AnswerSubmitted>) {
          require(state.pending_question.has_value(), ev, "no pending question");
          require(!state.pending_answer, ev, "answer already submitted");
          require(!trim(e.text).empty(), ev, "empty answer");
          state.pending_answer = e.text;
        } else if constexpr (std::is_same_v<E, event::Evaluated>) {
          require(state.pending_answer.has_value(), ev, "no submitted answer to evaluate");
          try {
            validate(e.evaluation);
          } catch (const ValidationError& err) {
            throw IllegalTransition("Evaluated: " + std::string(err.what()));
          }
          state.turns.push_back(TurnRecord{*state.pending_question, *state.pending_answer, e.evaluation, ev.at});
          state.pending_question.reset();
          state.pending_answer.reset();
        } else if constexpr (std::is_same_v<E, event::DifficultyChanged>) {
          require(state.awaiting_adaptation(), ev, "only legal after an evaluation");
          require(std::abs(e.level.value() - state.difficulty.value()) == 1, ev, "difficulty moves one step at a time");
          state.difficulty = e.level;
        } else if constexpr (std::is_same_v<E, event::StreakChanged>) {
          require(state.awaiting_adaptation(), ev, "only legal after an evaluation");
          require(e.count >= 0 && static_cast<std::size_t>(e.count) <= state.turns.size(), ev,
                  "streak outside [0, turn count]");
          state.consecutive_high_scores = e.count;
        } else if constexpr (std::is_same_v<E, event::TransferPassed>) {
          require(state.awaiting_adaptation(), ev, "only legal after an evaluation");
          require(state.phase == Phase::Transferring, ev, "not transferring");
          const auto& last = state.turns.back().question;
          require(last.kind == QuestionKind::Transfer && last.transfer_domain == e.domain, ev,
                  "last turn was not a transfer question in this domain");
          state.transfer_passes.insert(e.domain);
        } else if constexpr (std::is_same_v<E, event::PhaseChanged>) {
          require(state.awaiting_adaptation(), ev, "only legal after an evaluation");
          require(phase_step_allowed(state.phase, e.phase), ev, "phase step not allowed");
          state.phase = e.phase;
        }
      },
      ev.payload);
  return state;
}

SessionState replay(const std::vector<SessionEvent>& events) {
  if (events.empty() || !std::holds_alternative<event::SessionCreated>(events.front().payload)) {
    throw IllegalTransition("log must begin with SessionCreated", 0);
  }
  SessionState state;
  for (std::size_t i = 0; i < events.size(); ++i) {
    try {
      state = apply_event(std::move(state), events[i]);
    } catch (const IllegalTransition& err) {
      throw IllegalTransition("event " + std::to_string(i) + ": " + err.what(), i);
    }
  }
  return state;
}

}  // namespace tutor
