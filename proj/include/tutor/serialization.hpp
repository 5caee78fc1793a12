#pragma once

#include "tutor/domain.hpp"
#include "tutor/response_parser.hpp"

#include <json.hpp>

namespace tutor {

using Json = nlohmann::ordered_json;

// Full question, answer key included. Only for completed turns and the event log.
Json question_to_json(const Question& question);
// Student-facing question: correct_label and reference_answer are never written.
Json redacted_question_to_json(const Question& question);
Question question_from_json(const Json& j);

Json evaluation_to_json(const Evaluation& evaluation);
Evaluation evaluation_from_json(const Json& j);

Json turn_to_json(const TurnRecord& turn);

Json failure_to_json(const ParseFailure& failure);

// One event per line in the session log.
Json event_to_json(const SessionEvent& event);
SessionEvent event_from_json(const Json& j);

}  // namespace tutor
