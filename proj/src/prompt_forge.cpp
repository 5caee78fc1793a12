#include "tutor/prompt_forge.hpp"

#include "tutor/text.hpp"

#include <fstream>
#include <sstream>

namespace tutor {

namespace {

constexpr std::string_view kQuestionGenBody =
    "You are a cognitive tutor writing practice questions for a student who chose the topic \"{{topic}}\".\n"
    "Difficulty runs from 1 (introductory) to 5 (advanced); the student is currently at level {{difficulty}}.\n"
    "{{performance_context}}"
    "Generate {{count}} {{question_type}} at difficulty level {{difficulty}} about {{topic}}. {{answer_rule}}\n"
    "\n"
    "{{output_format}}\n";

constexpr std::string_view kEvaluationBody =
    "You are a cognitive tutor. Write an evaluation of the student's response to the question below.\n"
    "Question: {{question}}\n"
    "{{answer_key}}"
    "Student response: {{student_answer}}\n"
    "\n"
    "Respond with exactly these three labeled lines and nothing else:\n"
    "Score: X/10 (an integer X from 0 to 10)\n"
    "Feedback: two or three sentences of feedback on the response\n"
    "Hint: one hint for improvement\n";

constexpr std::string_view kTransferGenBody =
    "Generate {{count}} {{question_noun}} about {{topic}} that {{relate_verb}} it to {{target_domain}}. "
    "Each question should have a short answer.\n"
    "\n"
    "Write each question and its short answer in exactly this format, numbering from 1:\n"
    "Q1: <question>\n"
    "A1: <short answer>\n";

constexpr std::string_view kMcqFormat =
    "Write the question in exactly this format:\n"
    "Q1: <question>\n"
    "A) <option>\n"
    "B) <option>\n"
    "C) <option>\n"
    "D) <option>\n"
    "Put the asterisk directly after the text of the correct option and nowhere else.";

constexpr std::string_view kShortAnswerFormat =
    "Write the question and its reference answer in exactly this format:\n"
    "Q1: <question>\n"
    "A1: <short reference answer>";

const std::set<std::string>& builder_vars(TemplateKind kind) {
  static const std::set<std::string> question = {"topic",       "difficulty",   "performance_context", "count",
                                                 "question_type", "answer_rule", "output_format"};
  static const std::set<std::string> evaluation = {"question", "answer_key", "student_answer"};
  static const std::set<std::string> transfer = {"topic", "target_domain", "count", "question_noun", "relate_verb"};
  switch (kind) {
    case TemplateKind::QuestionGen: return question;
    case TemplateKind::Evaluation: return evaluation;
    case TemplateKind::TransferGen: return transfer;
  }
  return question;
}

bool valid_name_char(char c, bool first) {
  if (c == '_' || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return true;
  return !first && c >= '0' && c <= '9';
}

bool is_brace(char c) { return c == '{' || c == '}'; }

// Appends `piece`, separating any pair of equal adjacent braces with a space,
// including a pair formed across the join.
void append_split_braces(std::string& out, std::string_view piece) {
  for (char c : piece) {
    if (is_brace(c) && !out.empty() && out.back() == c) out.push_back(' ');
    out.push_back(c);
  }
}

std::string option_line(const Option& option) {
  return std::string(1, option.label) + ") " + option.text;
}

}  // namespace

std::string_view to_string(TemplateKind kind) noexcept {
  switch (kind) {
    case TemplateKind::QuestionGen: return "question_gen";
    case TemplateKind::Evaluation: return "evaluation";
    case TemplateKind::TransferGen: return "transfer_gen";
  }
  return "unknown";
}

MissingVariable::MissingVariable(std::string var)
    : TemplateError("missing template variable '" + var + "'"), name(std::move(var)) {}

UnknownVariable::UnknownVariable(std::string var)
    : TemplateError("unknown template variable '" + var + "'"), name(std::move(var)) {}

PromptTemplate::PromptTemplate(TemplateKind kind, std::string body) : kind_(kind), body_(std::move(body)) {
  std::string literal;
  std::size_t i = 0;
  auto flush_literal = [&] {
    if (literal.find("{{") != std::string::npos || literal.find("}}") != std::string::npos) {
      throw TemplateError("stray placeholder delimiter in " + std::string(to_string(kind_)) + " template");
    }
    if (!literal.empty()) segments_.push_back({false, std::move(literal)});
    literal.clear();
  };
  while (i < body_.size()) {
    if (body_.compare(i, 2, "{{") == 0) {
      auto close = body_.find("}}", i + 2);
      if (close == std::string::npos) {
        throw TemplateError("unterminated placeholder at offset " + std::to_string(i));
      }
      std::string name = body_.substr(i + 2, close - i - 2);
      for (std::size_t k = 0; k < name.size(); ++k) {
        if (!valid_name_char(name[k], k == 0)) {
          throw TemplateError("invalid placeholder name '" + name + "'");
        }
      }
      if (name.empty()) throw TemplateError("empty placeholder at offset " + std::to_string(i));
      flush_literal();
      required_.insert(name);
      segments_.push_back({true, std::move(name)});
      i = close + 2;
    } else {
      literal.push_back(body_[i]);
      ++i;
    }
  }
  flush_literal();
}

PromptText make_prompt(std::string text, TemplateKind kind) {
  PromptText prompt{std::move(text), kind, {}};
  prompt.fingerprint = fingerprint(prompt.text);
  return prompt;
}

PromptText substitute_context(const PromptTemplate& tmpl, const ContextVars& vars, bool strict) {
  for (const auto& name : tmpl.required_vars()) {
    if (!vars.contains(name)) throw MissingVariable(name);
  }
  if (strict) {
    for (const auto& [name, value] : vars) {
      if (!tmpl.required_vars().contains(name)) throw UnknownVariable(name);
    }
  }
  std::string out;
  out.reserve(tmpl.body().size() * 2);
  for (const auto& segment : tmpl.segments_) {
    append_split_braces(out, segment.placeholder ? vars.at(segment.text) : segment.text);
  }
  return make_prompt(std::move(out), tmpl.kind());
}

std::string_view builtin_template_body(TemplateKind kind) noexcept {
  switch (kind) {
    case TemplateKind::QuestionGen: return kQuestionGenBody;
    case TemplateKind::Evaluation: return kEvaluationBody;
    case TemplateKind::TransferGen: return kTransferGenBody;
  }
  return {};
}

std::string_view template_file_name(TemplateKind kind) noexcept {
  switch (kind) {
    case TemplateKind::QuestionGen: return "question_gen.txt";
    case TemplateKind::Evaluation: return "evaluation.txt";
    case TemplateKind::TransferGen: return "transfer_gen.txt";
  }
  return {};
}

TemplateSet TemplateSet::builtin() {
  return TemplateSet{
      PromptTemplate(TemplateKind::QuestionGen, std::string(kQuestionGenBody)),
      PromptTemplate(TemplateKind::Evaluation, std::string(kEvaluationBody)),
      PromptTemplate(TemplateKind::TransferGen, std::string(kTransferGenBody)),
  };
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
  auto read = [&](TemplateKind kind) {
    auto path = dir / template_file_name(kind);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TemplateError("cannot read template " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    PromptTemplate tmpl(kind, buf.str());
    for (const auto& name : tmpl.required_vars()) {
      if (!builder_vars(kind).contains(name)) {
        throw TemplateError(path.string() + ": unsupported placeholder '" + name + "'");
      }
    }
    return tmpl;
  };
  return TemplateSet{read(TemplateKind::QuestionGen), read(TemplateKind::Evaluation),
                     read(TemplateKind::TransferGen)};
}

PromptForge::PromptForge(TemplateSet templates) : templates_(std::move(templates)) {}

PromptText PromptForge::build_question_prompt(const Topic& topic, DifficultyLevel difficulty, QuestionKind kind,
                                              const TurnRecord* last_turn) const {
  if (kind == QuestionKind::Transfer) {
    throw std::invalid_argument("transfer questions are built with build_transfer_prompt");
  }
  const bool mcq = kind == QuestionKind::MultipleChoice;
  std::string performance;
  if (last_turn != nullptr) {
    const auto& q = last_turn->question;
    performance += "Previous question: " + q.stem + "\n";
    if (q.kind == QuestionKind::MultipleChoice && q.correct_label) {
      for (const auto& option : q.options) performance += option_line(option) + "\n";
      performance += "Correct option: " + std::string(1, *q.correct_label) + "\n";
    }
    performance += "Student answer: " + last_turn->student_answer + "\n";
    performance += "Score: " + std::to_string(last_turn->evaluation.score) + "/10\n";
    performance +=
        "Use this result to pitch the next question: build on what the student understood and target what "
        "was missing.\n";
  }
  std::string answer_rule(mcq ? kMcqOptionsInstruction : kShortAnswerInstruction);
  if (mcq) answer_rule += " " + std::string(kAsteriskInstruction);

  ContextVars vars{
      {"topic", topic.text()},
      {"difficulty", std::to_string(difficulty.value())},
      {"performance_context", performance},
      {"count", number_word(1)},
      {"question_type", mcq ? "multiple-choice question" : "short-answer question"},
      {"answer_rule", answer_rule},
      {"output_format", std::string(mcq ? kMcqFormat : kShortAnswerFormat)},
  };
  return substitute_context(templates_.question_gen, vars, false);
}

PromptText PromptForge::build_evaluation_prompt(const Question& question, std::string_view student_answer) const {
  auto answer = trim(student_answer);
  if (answer.empty()) throw EmptyAnswer();

  std::string key;
  std::string response = answer;
  if (question.kind == QuestionKind::MultipleChoice) {
    for (const auto& option : question.options) key += option_line(option) + "\n";
    if (question.correct_label) key += "Correct option: " + std::string(1, *question.correct_label) + "\n";
    key += "Student selected option: " + answer + "\n";
    for (const auto& option : question.options) {
      if (answer.size() == 1 && option.label == answer[0]) response = option_line(option);
    }
  } else {
    if (question.transfer_domain) key += "Target domain: " + *question.transfer_domain + "\n";
    if (question.reference_answer) key += "Reference answer: " + *question.reference_answer + "\n";
  }
  ContextVars vars{
      {"question", question.stem},
      {"answer_key", key},
      {"student_answer", response},
  };
  return substitute_context(templates_.evaluation, vars, false);
}

PromptText PromptForge::build_transfer_prompt(const Topic& topic, std::string_view target_domain, int count) const {
  auto domain = trim(target_domain);
  if (domain.empty()) throw std::invalid_argument("transfer domain must not be empty");
  if (count < 1) throw std::invalid_argument("transfer question count must be at least 1");
  ContextVars vars{
      {"topic", topic.text()},
      {"target_domain", domain},
      {"count", number_word(count)},
      {"question_noun", count == 1 ? "question" : "questions"},
      {"relate_verb", count == 1 ? "relates" : "relate"},
  };
  return substitute_context(templates_.transfer_gen, vars, false);
}

}  // namespace tutor
