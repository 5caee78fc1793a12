#include "tutor/serialization.hpp"

namespace tutor {

namespace {

Json question_common(const Question& q) {
  Json j;
  j["id"] = q.id;
  j["kind"] = to_string(q.kind);
  j["stem"] = q.stem;
  j["difficulty"] = q.difficulty.value();
  if (!q.options.empty()) {
    Json options = Json::array();
    for (const auto& option : q.options) {
      options.push_back({{"label", std::string(1, option.label)}, {"text", option.text}});
    }
    j["options"] = std::move(options);
  }
  if (q.transfer_domain) j["transfer_domain"] = *q.transfer_domain;
  return j;
}

char label_from_json(const Json& j) {
  auto s = j.get<std::string>();
  if (s.size() != 1) throw ValidationError("option label must be one character");
  return s[0];
}

}  // namespace

Json question_to_json(const Question& q) {
  Json j = question_common(q);
  if (q.correct_label) j["correct_label"] = std::string(1, *q.correct_label);
  if (q.reference_answer) j["reference_answer"] = *q.reference_answer;
  return j;
}

Json redacted_question_to_json(const Question& q) { return question_common(q); }

Question question_from_json(const Json& j) {
  Question q;
  q.id = j.at("id").get<std::string>();
  q.kind = question_kind_from_string(j.at("kind").get<std::string>());
  q.stem = j.at("stem").get<std::string>();
  q.difficulty = DifficultyLevel(j.at("difficulty").get<int>());
  if (j.contains("options")) {
    for (const auto& option : j.at("options")) {
      q.options.push_back({label_from_json(option.at("label")), option.at("text").get<std::string>()});
    }
  }
  if (j.contains("correct_label")) q.correct_label = label_from_json(j.at("correct_label"));
  if (j.contains("reference_answer")) q.reference_answer = j.at("reference_answer").get<std::string>();
  if (j.contains("transfer_domain")) q.transfer_domain = j.at("transfer_domain").get<std::string>();
  return q;
}

Json evaluation_to_json(const Evaluation& e) {
  Json j;
  j["score"] = e.score;
  j["feedback"] = e.feedback;
  if (e.hint) j["hint"] = *e.hint;
  return j;
}

Evaluation evaluation_from_json(const Json& j) {
  Evaluation e;
  e.score = j.at("score").get<int>();
  e.feedback = j.at("feedback").get<std::string>();
  if (j.contains("hint")) e.hint = j.at("hint").get<std::string>();
  return e;
}

Json turn_to_json(const TurnRecord& turn) {
  Json j;
  j["question"] = question_to_json(turn.question);
  j["student_answer"] = turn.student_answer;
  j["evaluation"] = evaluation_to_json(turn.evaluation);
  j["timestamp"] = turn.timestamp;
  return j;
}

Json failure_to_json(const ParseFailure& f) {
  Json j;
  j["kind"] = to_string(f.kind);
  if (!f.field.empty()) j["field"] = f.field;
  j["location"] = f.location;
  j["excerpt"] = f.excerpt;
  return j;
}

Json event_to_json(const SessionEvent& ev) {
  Json j;
  j["type"] = event_name(ev);
  j["at"] = ev.at;
  std::visit(
      [&](const auto& e) {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, event::SessionCreated>) {
          j["session_id"] = e.session_id;
          j["topic"] = e.topic;
        } else if constexpr (std::is_same_v<E, event::QuestionPosed>) {
          j["question"] = question_to_json(e.question);
        } else if constexpr (std::is_same_v<E, event::AnswerSubmitted>) {
          j["text"] = e.text;
        } else if constexpr (std::is_same_v<E, event::Evaluated>) {
          j["evaluation"] = evaluation_to_json(e.evaluation);
        } else if constexpr (std::is_same_v<E, event::PhaseChanged>) {
          j["phase"] = to_string(e.phase);
        } else if constexpr (std::is_same_v<E, event::DifficultyChanged>) {
          j["level"] = e.level.value();
        } else if constexpr (std::is_same_v<E, event::StreakChanged>) {
          j["count"] = e.count;
        } else if constexpr (std::is_same_v<E, event::TransferPassed>) {
          j["domain"] = e.domain;
        }
      },
      ev.payload);
  return j;
}

SessionEvent event_from_json(const Json& j) {
  const auto type = j.at("type").get<std::string>();
  const Timestamp at = j.at("at").get<Timestamp>();
  if (type == "SessionCreated") {
    return {event::SessionCreated{j.at("session_id").get<std::string>(), j.at("topic").get<std::string>()}, at};
  }
  if (type == "QuestionPosed") return {event::QuestionPosed{question_from_json(j.at("question"))}, at};
  if (type == "AnswerSubmitted") return {event::AnswerSubmitted{j.at("text").get<std::string>()}, at};
  if (type == "Evaluated") return {event::Evaluated{evaluation_from_json(j.at("evaluation"))}, at};
  if (type == "PhaseChanged") return {event::PhaseChanged{phase_from_string(j.at("phase").get<std::string>())}, at};
  if (type == "DifficultyChanged") return {event::DifficultyChanged{DifficultyLevel(j.at("level").get<int>())}, at};
  if (type == "StreakChanged") return {event::StreakChanged{j.at("count").get<int>()}, at};
  if (type == "TransferPassed") return {event::TransferPassed{j.at("domain").get<std::string>()}, at};
  throw ValidationError("unknown event type '" + type + "'");
}

}  // namespace tutor
