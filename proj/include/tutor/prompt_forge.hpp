#pragma once

#include "tutor/domain.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tutor {

enum class TemplateKind { QuestionGen, Evaluation, TransferGen };

std::string_view to_string(TemplateKind kind) noexcept;

struct TemplateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingVariable : TemplateError {
  explicit MissingVariable(std::string var);
  std::string name;
};

struct UnknownVariable : TemplateError {
  explicit UnknownVariable(std::string var);
  std::string name;
};

struct EmptyAnswer : std::invalid_argument {
  EmptyAnswer() : std::invalid_argument("student answer is empty") {}
};

struct PromptText;

// Plain text with {{name}} placeholders. The placeholder set is derived from
// the body, so `required_vars()` always matches it exactly.
class PromptTemplate {
public:
  PromptTemplate(TemplateKind kind, std::string body);

  TemplateKind kind() const noexcept { return kind_; }
  const std::string& body() const noexcept { return body_; }
  const std::set<std::string>& required_vars() const noexcept { return required_; }

private:
  friend PromptText substitute_context(const PromptTemplate&, const std::map<std::string, std::string>&, bool);
  struct Segment {
    bool placeholder = false;
    std::string text;  // literal text, or the placeholder name
  };

  TemplateKind kind_;
  std::string body_;
  std::set<std::string> required_;
  std::vector<Segment> segments_;
};

using ContextVars = std::map<std::string, std::string>;

struct PromptText {
  std::string text;
  TemplateKind kind = TemplateKind::QuestionGen;
  std::string fingerprint;

  friend bool operator==(const PromptText&, const PromptText&) = default;
};

// Makes a PromptText with its fingerprint; used for prompts not built from a
// template (repair prompts, tests).
PromptText make_prompt(std::string text, TemplateKind kind);

// Single pass: substituted values are never rescanned for placeholders.
// Brace pairs inside values are split ("{{" becomes "{ {") so the result never
// contains a placeholder delimiter.
PromptText substitute_context(const PromptTemplate& tmpl, const ContextVars& vars, bool strict = true);

struct TemplateSet {
  PromptTemplate question_gen;
  PromptTemplate evaluation;
  PromptTemplate transfer_gen;

  static TemplateSet builtin();
  // Reads question_gen.txt, evaluation.txt and transfer_gen.txt from `dir`.
  static TemplateSet load(const std::filesystem::path& dir);
};

std::string_view builtin_template_body(TemplateKind kind) noexcept;
std::string_view template_file_name(TemplateKind kind) noexcept;

class PromptForge {
public:
  PromptForge() : PromptForge(TemplateSet::builtin()) {}
  explicit PromptForge(TemplateSet templates);

  // `kind` must not be Transfer; use build_transfer_prompt for those.
  PromptText build_question_prompt(const Topic& topic, DifficultyLevel difficulty, QuestionKind kind,
                                   const TurnRecord* last_turn = nullptr) const;

  // For multiple-choice questions `student_answer` is the chosen option label.
  PromptText build_evaluation_prompt(const Question& question, std::string_view student_answer) const;

  PromptText build_transfer_prompt(const Topic& topic, std::string_view target_domain, int count) const;

  const TemplateSet& templates() const noexcept { return templates_; }

private:
  TemplateSet templates_;
};

// The sentence the question prompt uses to require the asterisk marker. Repair
// prompts quote it back to the provider.
inline constexpr std::string_view kAsteriskInstruction = "Indicate the correct answer with an asterisk (*).";
inline constexpr std::string_view kMcqOptionsInstruction =
    "Each question should have four options (A-D) and one correct answer.";
inline constexpr std::string_view kShortAnswerInstruction = "Each question should have a short answer.";

}  // namespace tutor
