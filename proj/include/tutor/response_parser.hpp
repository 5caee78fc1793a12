#pragma once

#include "tutor/domain.hpp"

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tutor {

enum class FailureKind {
  NoBlocksFound,
  MissingCorrectMarker,
  MultipleCorrectMarkers,
  MissingField,
  MalformedScore,
  IndexGap,
};

std::string_view to_string(FailureKind kind) noexcept;

struct ParseFailure {
  FailureKind kind = FailureKind::NoBlocksFound;
  std::string field;       // set for MissingField
  std::size_t location = 0;  // character offset into the parsed text
  std::string excerpt;     // substring of the input starting at `location`, at most 80 chars

  std::string describe() const;

  friend bool operator==(const ParseFailure&, const ParseFailure&) = default;
};

// Every parser reports malformed input by throwing ParseError and nothing else.
struct ParseError : std::runtime_error {
  explicit ParseError(ParseFailure f);
  ParseFailure failure;
};

struct McqItem {
  int index = 1;
  std::string stem;
  std::array<std::string, 4> options;  // texts for A-D, marker stripped
  char correct_label = 'A';

  friend bool operator==(const McqItem&, const McqItem&) = default;
};

struct McqBlock {
  std::vector<McqItem> questions;

  friend bool operator==(const McqBlock&, const McqBlock&) = default;
};

struct QaPair {
  int index = 1;
  std::string question_text;
  std::string answer_text;

  friend bool operator==(const QaPair&, const QaPair&) = default;
};

enum class BlockKind { Mcq, ShortQa, Evaluation, Unknown };

std::string_view to_string(BlockKind kind) noexcept;

McqBlock parse_mcq_block(std::string_view text);
Evaluation parse_evaluation_block(std::string_view text);
std::vector<QaPair> parse_short_qa_block(std::string_view text);

BlockKind classify_block(std::string_view text);

std::string canonical_render(const McqBlock& block);
std::string canonical_render(const std::vector<QaPair>& pairs);
std::string canonical_render(const Evaluation& evaluation);

// Round X/D to the nearest tenth-scale integer, halves rounding up.
int normalize_score(long long numerator, long long denominator);

// Listed items inside an answer: lines after the first that start with a
// bullet marker ("-", "*", "•"), or, when the first line ends with ':', every
// following non-empty line. Markers are stripped.
std::vector<std::string> answer_items(const QaPair& pair);

// Conversions into session questions. Ids are left empty for the caller.
Question to_question(const McqItem& item, DifficultyLevel difficulty);
Question to_question(const QaPair& pair, DifficultyLevel difficulty, std::optional<std::string> transfer_domain);

}  // namespace tutor
