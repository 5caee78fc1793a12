#include "tutor/session_service.hpp"

#include "tutor/text.hpp"

#include <algorithm>
#include <chrono>
#include <random>

namespace tutor {

namespace {

Question redacted(Question q) {
  q.correct_label.reset();
  q.reference_answer.reset();
  return q;
}

std::optional<Question> redacted(const std::optional<Question>& q) {
  if (!q) return std::nullopt;
  return redacted(*q);
}

Timestamp system_now() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string random_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  static constexpr char kHex[] = "0123456789abcdef";
  std::uint64_t bits = rng();
  std::string id(16, '0');
  for (auto& c : id) {
    c = kHex[bits & 0xf];
    bits >>= 4;
  }
  return id;
}

std::string_view format_contract(BlockKind kind) {
  switch (kind) {
    case BlockKind::Mcq:
      return "Q1: <question>\nA) <option>\nB) <option>\nC) <option>\nD) <option>\n"
             "Each question should have four options (A-D) and one correct answer. "
             "Indicate the correct answer with an asterisk (*).";
    case BlockKind::ShortQa:
      return "Q1: <question>\nA1: <short answer>\nEach question should have a short answer.";
    case BlockKind::Evaluation:
      return "Score: X/10\nFeedback: two or three sentences of feedback\nHint: one hint for improvement";
    case BlockKind::Unknown:
      break;
  }
  return "";
}

std::string question_id_for(const SessionState& state) { return "q" + std::to_string(state.turns.size() + 1); }

// Appends the repairs gathered during one call to the session's log, whatever
// the outcome of the call.
class RepairRecorder {
public:
  RepairRecorder(std::mutex& m, std::vector<RepairAttempt>& sink) : mutex_(m), sink_(sink) {}
  ~RepairRecorder() {
    std::lock_guard lock(mutex_);
    sink_.insert(sink_.end(), attempts.begin(), attempts.end());
  }
  RepairRecorder(const RepairRecorder&) = delete;
  RepairRecorder& operator=(const RepairRecorder&) = delete;

  std::vector<RepairAttempt> attempts;

private:
  std::mutex& mutex_;
  std::vector<RepairAttempt>& sink_;
};

}  // namespace

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Validation: return "Validation";
    case ErrorCode::EmptyAnswer: return "EmptyAnswer";
    case ErrorCode::InvalidAnswer: return "InvalidAnswer";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::NoPendingQuestion: return "NoPendingQuestion";
    case ErrorCode::QuestionPending: return "QuestionPending";
    case ErrorCode::Conflict: return "Conflict";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::GenerationUnparseable: return "GenerationUnparseable";
    case ErrorCode::EvaluationUnparseable: return "EvaluationUnparseable";
    case ErrorCode::ExhaustedDomains: return "ExhaustedDomains";
    case ErrorCode::Internal: return "Internal";
  }
  return "Internal";
}

ServiceError::ServiceError(ErrorCode c, const std::string& message) : std::runtime_error(message), code(c) {}

PromptText repair_completion(const ParseFailure& failure, std::string_view original, BlockKind expected,
                             int attempt_index) {
  if (attempt_index > kRepairBudget) throw RepairBudgetExhausted();
  if (attempt_index < 1) throw std::invalid_argument("repair attempts count from 1");
  std::string text;
  text += "Your previous output could not be used because it did not follow the required format.\n";
  text += "Problem: " + failure.describe() + "\n";
  text += "Previous output:\n<<<\n" + std::string(original) + "\n>>>\n";
  text += "Rewrite it so that it follows this format exactly, with no other text:\n";
  text += format_contract(expected);
  text += "\n";
  return make_prompt(std::move(text),
                     expected == BlockKind::Evaluation ? TemplateKind::Evaluation : TemplateKind::QuestionGen);
}

SessionView SessionView::of(const SessionState& state) {
  SessionView view;
  view.session_id = state.session_id;
  view.topic = state.topic ? state.topic->text() : std::string{};
  view.pending_question = redacted(state.pending_question);
  view.difficulty = state.difficulty;
  view.phase = state.phase;
  view.turn_count = state.turns.size();
  return view;
}

std::pair<std::string, Evaluation> grade_choice(const Question& question, std::string_view answer) {
  const auto text = trim(answer);
  std::optional<char> label;
  auto as_label = [](char c) -> std::optional<char> {
    if (c >= 'a' && c <= 'd') return static_cast<char>(c - 'a' + 'A');
    if (c >= 'A' && c <= 'D') return c;
    return std::nullopt;
  };
  if (text.size() == 1 || (text.size() == 2 && (text[1] == ')' || text[1] == '.'))) label = as_label(text[0]);
  if (!label) {
    for (const auto& option : question.options) {
      if (to_lower(option.text) == to_lower(text)) label = option.label;
    }
  }
  if (!label) throw ServiceError(ErrorCode::InvalidAnswer, "answer with one of the option labels A-D");

  auto option_text = [&](char l) {
    for (const auto& option : question.options) {
      if (option.label == l) return std::string(1, l) + ") " + option.text;
    }
    return std::string(1, l);
  };
  Evaluation evaluation;
  if (question.correct_label == label) {
    evaluation.score = 10;
    evaluation.feedback = "Correct. The answer is " + option_text(*label) + ".";
  } else {
    evaluation.score = 0;
    evaluation.feedback = "Not quite. You chose " + option_text(*label) + "; the correct answer is " +
                          option_text(question.correct_label.value_or('A')) + ".";
  }
  return {std::string(1, *label), evaluation};
}

SessionService::SessionService(Dependencies deps) : deps_(std::move(deps)) {
  if (!deps_.provider) throw std::invalid_argument("session service needs a completion provider");
  if (!deps_.store) throw std::invalid_argument("session service needs an event store");
  deps_.policy.validate();
  if (!deps_.clock) deps_.clock = system_now;
  if (!deps_.next_id) deps_.next_id = random_id;
}

void SessionService::recover() {
  auto logs = deps_.store->load_all();
  std::unordered_map<std::string, std::shared_ptr<Slot>> rebuilt;
  for (auto& [id, events] : logs) {
    auto slot = std::make_shared<Slot>();
    try {
      slot->committed = replay(events);
    } catch (const IllegalTransition& err) {
      throw ServiceError(ErrorCode::Internal, "session " + id + " has a corrupt log: " + err.what());
    }
    slot->log = std::move(events);
    rebuilt.emplace(id, std::move(slot));
  }
  std::unique_lock lock(sessions_mutex_);
  sessions_ = std::move(rebuilt);
}

std::shared_ptr<SessionService::Slot> SessionService::find(const std::string& session_id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw ServiceError(ErrorCode::UnknownSession, "unknown session '" + session_id + "'");
  return it->second;
}

void SessionService::commit(Slot& slot, const std::string& session_id, std::vector<SessionEvent> batch,
                            SessionState next) {
  try {
    deps_.store->append(session_id, batch);
  } catch (const StoreError& err) {
    throw ServiceError(ErrorCode::Internal, err.what());
  }
  std::lock_guard lock(slot.committed_mutex);
  slot.committed = std::move(next);
  slot.log.insert(slot.log.end(), std::make_move_iterator(batch.begin()), std::make_move_iterator(batch.end()));
}

std::string SessionService::complete_text(const PromptText& prompt, double temperature) {
  CompletionRequest request;
  request.prompt = prompt;
  request.temperature = temperature;
  try {
    return deps_.provider->complete(request).text;
  } catch (const GatewayError& err) {
    throw ServiceError(ErrorCode::ProviderUnavailable, err.what());
  }
}

template <typename Parse>
auto SessionService::complete_and_parse(PromptText prompt, double temperature, BlockKind expected, Parse parse,
                                        std::vector<RepairAttempt>& repairs, ErrorCode on_failure) {
  for (int attempt = 0;; ++attempt) {
    const std::string text = complete_text(prompt, temperature);
    try {
      return parse(text);
    } catch (const ParseError& err) {
      if (attempt >= kRepairBudget) {
        ServiceError error(on_failure, "completion unparseable after " + std::to_string(kRepairBudget) +
                                           " repairs: " + err.failure.describe());
        error.failure = err.failure;
        throw error;
      }
      PromptText repair = repair_completion(err.failure, text, expected, attempt + 1);
      repairs.push_back({text, err.failure, repair, attempt + 1});
      prompt = std::move(repair);
    }
  }
}

Question SessionService::generate_question(const SessionState& state, const TutorAction& action,
                                           std::vector<RepairAttempt>& repairs) {
  const Topic& topic = *state.topic;
  Question question;
  if (action.type == TutorAction::Type::AskTransfer) {
    auto prompt = deps_.forge.build_transfer_prompt(topic, action.domain, 1);
    question = complete_and_parse(
        std::move(prompt), CompletionRequest::kGenerationTemperature, BlockKind::ShortQa,
        [&](const std::string& text) {
          return to_question(parse_short_qa_block(text).front(), state.difficulty, action.domain);
        },
        repairs, ErrorCode::GenerationUnparseable);
  } else {
    const TurnRecord* last = state.turns.empty() ? nullptr : &state.turns.back();
    auto prompt = deps_.forge.build_question_prompt(topic, state.difficulty, action.kind, last);
    if (action.kind == QuestionKind::MultipleChoice) {
      question = complete_and_parse(
          std::move(prompt), CompletionRequest::kGenerationTemperature, BlockKind::Mcq,
          [&](const std::string& text) { return to_question(parse_mcq_block(text).questions.front(), state.difficulty); },
          repairs, ErrorCode::GenerationUnparseable);
    } else {
      question = complete_and_parse(
          std::move(prompt), CompletionRequest::kGenerationTemperature, BlockKind::ShortQa,
          [&](const std::string& text) {
            return to_question(parse_short_qa_block(text).front(), state.difficulty, std::nullopt);
          },
          repairs, ErrorCode::GenerationUnparseable);
    }
  }
  question.id = question_id_for(state);
  return question;
}

Evaluation SessionService::evaluate(const Question& question, std::string& answer,
                                    std::vector<RepairAttempt>& repairs) {
  if (question.kind == QuestionKind::MultipleChoice) {
    auto [label, evaluation] = grade_choice(question, answer);
    answer = std::move(label);
    return evaluation;
  }
  auto prompt = deps_.forge.build_evaluation_prompt(question, answer);
  return complete_and_parse(
      std::move(prompt), CompletionRequest::kEvaluationTemperature, BlockKind::Evaluation,
      [](const std::string& text) { return parse_evaluation_block(text); }, repairs,
      ErrorCode::EvaluationUnparseable);
}

SessionView SessionService::create_session(std::string_view topic_text) {
  std::optional<Topic> topic;
  try {
    topic.emplace(topic_text);
  } catch (const ValidationError& err) {
    throw ServiceError(ErrorCode::Validation, err.what());
  }

  auto slot = std::make_shared<Slot>();
  std::unique_lock writer(slot->writer);
  std::string id;
  {
    std::unique_lock lock(sessions_mutex_);
    do {
      id = deps_.next_id();
    } while (sessions_.contains(id));
    SessionEvent created{event::SessionCreated{id, topic->text()}, deps_.clock()};
    SessionState state = apply_event(SessionState{}, created);
    try {
      deps_.store->append(id, {created});
    } catch (const StoreError& err) {
      throw ServiceError(ErrorCode::Internal, err.what());
    }
    slot->committed = std::move(state);
    slot->log.push_back(std::move(created));
    sessions_.emplace(id, slot);
  }

  RepairRecorder recorder(slot->committed_mutex, slot->repairs);
  SessionState state = slot->committed;
  try {
    const TutorAction action = select_next_action(state, deps_.policy);
    Question question = generate_question(state, action, recorder.attempts);
    SessionEvent posed{event::QuestionPosed{std::move(question)}, deps_.clock()};
    state = apply_event(std::move(state), posed);
    commit(*slot, id, {std::move(posed)}, state);
  } catch (ServiceError& err) {
    err.session_id = id;
    throw;
  }
  return SessionView::of(state);
}

TurnResult SessionService::submit_answer(const std::string& session_id, std::string_view answer,
                                         std::optional<std::string> expected_question_id) {
  auto slot = find(session_id);
  std::unique_lock writer(slot->writer, std::try_to_lock);
  if (!writer.owns_lock()) {
    throw ServiceError(ErrorCode::Conflict, "another request for this session is in flight");
  }
  SessionState state;
  {
    std::lock_guard lock(slot->committed_mutex);
    state = slot->committed;
  }
  if (!state.pending_question) throw ServiceError(ErrorCode::NoPendingQuestion, "no question is pending");
  if (expected_question_id && *expected_question_id != state.pending_question->id) {
    throw ServiceError(ErrorCode::Conflict, "question " + *expected_question_id + " is no longer pending");
  }
  std::string stored_answer = trim(answer);
  if (stored_answer.empty()) throw ServiceError(ErrorCode::EmptyAnswer, "answer must not be empty");

  RepairRecorder recorder(slot->committed_mutex, slot->repairs);
  const Evaluation evaluation = evaluate(*state.pending_question, stored_answer, recorder.attempts);

  std::vector<SessionEvent> batch;
  auto push = [&](SessionEvent ev) {
    state = apply_event(std::move(state), ev);
    batch.push_back(std::move(ev));
  };
  push({event::AnswerSubmitted{stored_answer}, deps_.clock()});
  push({event::Evaluated{evaluation}, deps_.clock()});
  for (auto& ev : adaptation_events(state, TurnOutcome::from_turn(state.turns.back()), deps_.policy, deps_.clock())) {
    push(std::move(ev));
  }

  TutorAction action;
  try {
    action = select_next_action(state, deps_.policy);
  } catch (const tutor::ExhaustedDomains& err) {
    throw ServiceError(ErrorCode::ExhaustedDomains, err.what());
  }

  TurnResult result;
  result.evaluation = evaluation;
  if (action.type != TutorAction::Type::DeclareMastery) {
    Question next = generate_question(state, action, recorder.attempts);
    push({event::QuestionPosed{next}, deps_.clock()});
    result.next_question = redacted(std::move(next));
  }
  result.difficulty_after = state.difficulty;
  result.phase_after = state.phase;
  commit(*slot, session_id, std::move(batch), std::move(state));
  return result;
}

SessionView SessionService::retry_question(const std::string& session_id) {
  auto slot = find(session_id);
  std::unique_lock writer(slot->writer, std::try_to_lock);
  if (!writer.owns_lock()) {
    throw ServiceError(ErrorCode::Conflict, "another request for this session is in flight");
  }
  SessionState state;
  {
    std::lock_guard lock(slot->committed_mutex);
    state = slot->committed;
  }
  if (state.pending_question) throw ServiceError(ErrorCode::QuestionPending, "a question is already pending");
  if (state.phase == Phase::Mastered) throw ServiceError(ErrorCode::NoPendingQuestion, "session already mastered");

  RepairRecorder recorder(slot->committed_mutex, slot->repairs);
  TutorAction action;
  try {
    action = select_next_action(state, deps_.policy);
  } catch (const tutor::ExhaustedDomains& err) {
    throw ServiceError(ErrorCode::ExhaustedDomains, err.what());
  }
  Question question = generate_question(state, action, recorder.attempts);
  SessionEvent posed{event::QuestionPosed{std::move(question)}, deps_.clock()};
  state = apply_event(std::move(state), posed);
  commit(*slot, session_id, {std::move(posed)}, state);
  return SessionView::of(state);
}

SessionView SessionService::get_session(const std::string& session_id) const {
  return SessionView::of(state(session_id));
}

SessionState SessionService::state(const std::string& session_id) const {
  auto slot = find(session_id);
  std::lock_guard lock(slot->committed_mutex);
  return slot->committed;
}

Transcript SessionService::get_transcript(const std::string& session_id) const {
  auto slot = find(session_id);
  std::lock_guard lock(slot->committed_mutex);
  Transcript transcript;
  transcript.session_id = slot->committed.session_id;
  transcript.topic = slot->committed.topic ? slot->committed.topic->text() : std::string{};
  transcript.turns = slot->committed.turns;
  transcript.pending_question = redacted(slot->committed.pending_question);
  for (std::size_t i = 0; i < slot->log.size(); ++i) {
    transcript.events.push_back({i, std::string(event_name(slot->log[i])), slot->log[i].at});
  }
  return transcript;
}

std::vector<RepairAttempt> SessionService::repair_log(const std::string& session_id) const {
  auto slot = find(session_id);
  std::lock_guard lock(slot->committed_mutex);
  return slot->repairs;
}

std::vector<std::string> SessionService::session_ids() const {
  std::shared_lock lock(sessions_mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, slot] : sessions_) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace tutor
