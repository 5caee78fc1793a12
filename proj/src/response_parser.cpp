#include "tutor/response_parser.hpp"

#include "tutor/text.hpp"

#include <algorithm>
#include <optional>

namespace tutor {

namespace {

struct Marker {
  char letter = 'Q';
  int index = 0;
  std::size_t begin = 0;          // offset of the letter
  std::size_t content_begin = 0;  // offset just past the colon
};

bool at_token_start(std::string_view text, std::size_t pos) {
  return pos == 0 || is_space(text[pos - 1]);
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// "Q12:" / "A3:" tokens that start at a whitespace boundary.
std::vector<Marker> find_markers(std::string_view text, std::string_view letters) {
  constexpr std::size_t kMaxDigits = 6;
  std::vector<Marker> markers;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (letters.find(text[i]) == std::string_view::npos || !at_token_start(text, i)) continue;
    std::size_t j = i + 1;
    while (j < text.size() && is_digit(text[j]) && j - i <= kMaxDigits) ++j;
    if (j == i + 1 || j - i - 1 > kMaxDigits || j >= text.size() || text[j] != ':') continue;
    int index = std::stoi(std::string(text.substr(i + 1, j - i - 1)));
    markers.push_back({text[i], index, i, j + 1});
  }
  return markers;
}

// First "X)" at or after `from` and before `until`, preceded by whitespace or
// sitting exactly at `from`.
std::optional<std::size_t> find_option_label(std::string_view text, char label, std::size_t from,
                                             std::size_t until) {
  for (std::size_t i = from; i + 1 < until; ++i) {
    if (text[i] == label && text[i + 1] == ')' && (i == from || is_space(text[i - 1]))) return i;
  }
  return std::nullopt;
}

[[noreturn]] void fail(std::string_view text, FailureKind kind, std::size_t location, std::string field = {}) {
  throw ParseError(ParseFailure{kind, std::move(field), location, excerpt_at(text, location)});
}

struct Label {
  std::string_view name;  // canonical spelling
  std::optional<std::size_t> begin;
  std::size_t content_begin = 0;
};

// Case-insensitive first occurrence of `name` + ':' at a token start.
std::optional<std::size_t> find_label(std::string_view text, std::string_view lowered, std::string_view name) {
  const std::string needle = to_lower(name) + ":";
  std::size_t pos = lowered.find(needle);
  while (pos != std::string_view::npos) {
    if (at_token_start(text, pos)) return pos;
    pos = lowered.find(needle, pos + 1);
  }
  return std::nullopt;
}

bool ends_with_marker(const std::string& s) { return !s.empty() && s.back() == '*'; }

}  // namespace

std::string_view to_string(FailureKind kind) noexcept {
  switch (kind) {
    case FailureKind::NoBlocksFound: return "NoBlocksFound";
    case FailureKind::MissingCorrectMarker: return "MissingCorrectMarker";
    case FailureKind::MultipleCorrectMarkers: return "MultipleCorrectMarkers";
    case FailureKind::MissingField: return "MissingField";
    case FailureKind::MalformedScore: return "MalformedScore";
    case FailureKind::IndexGap: return "IndexGap";
  }
  return "Unknown";
}

std::string_view to_string(BlockKind kind) noexcept {
  switch (kind) {
    case BlockKind::Mcq: return "mcq";
    case BlockKind::ShortQa: return "short_qa";
    case BlockKind::Evaluation: return "evaluation";
    case BlockKind::Unknown: return "unknown";
  }
  return "unknown";
}

std::string ParseFailure::describe() const {
  std::string out(to_string(kind));
  if (!field.empty()) out += "(" + field + ")";
  out += " at offset " + std::to_string(location);
  if (!excerpt.empty()) out += " near \"" + excerpt + "\"";
  return out;
}

ParseError::ParseError(ParseFailure f) : std::runtime_error(f.describe()), failure(std::move(f)) {}

McqBlock parse_mcq_block(std::string_view text) {
  auto markers = find_markers(text, "Q");
  if (markers.empty()) fail(text, FailureKind::NoBlocksFound, 0);

  McqBlock block;
  for (std::size_t k = 0; k < markers.size(); ++k) {
    const auto& m = markers[k];
    if (m.index != static_cast<int>(k) + 1) fail(text, FailureKind::IndexGap, m.begin);
    const std::size_t end = k + 1 < markers.size() ? markers[k + 1].begin : text.size();

    std::array<std::size_t, 4> label_pos{};
    std::size_t cursor = m.content_begin;
    for (std::size_t o = 0; o < kOptionLabels.size(); ++o) {
      auto pos = find_option_label(text, kOptionLabels[o], cursor, end);
      if (!pos) fail(text, FailureKind::MissingField, cursor, std::string(1, kOptionLabels[o]) + ")");
      label_pos[o] = *pos;
      cursor = *pos + 2;
    }

    McqItem item;
    item.index = m.index;
    item.stem = trim(text.substr(m.content_begin, label_pos[0] - m.content_begin));
    if (item.stem.empty()) fail(text, FailureKind::MissingField, m.content_begin, "stem");

    int marked = 0;
    for (std::size_t o = 0; o < kOptionLabels.size(); ++o) {
      const std::size_t from = label_pos[o] + 2;
      const std::size_t to = o + 1 < kOptionLabels.size() ? label_pos[o + 1] : end;
      std::string option = trim(text.substr(from, to - from));
      if (ends_with_marker(option)) {
        option.pop_back();
        option = trim(option);
        item.correct_label = kOptionLabels[o];
        ++marked;
      }
      if (option.empty()) fail(text, FailureKind::MissingField, label_pos[o], std::string(1, kOptionLabels[o]) + ")");
      item.options[o] = std::move(option);
    }
    if (marked == 0) fail(text, FailureKind::MissingCorrectMarker, m.begin);
    if (marked > 1) fail(text, FailureKind::MultipleCorrectMarkers, m.begin);
    block.questions.push_back(std::move(item));
  }
  return block;
}

int normalize_score(long long numerator, long long denominator) {
  return static_cast<int>((numerator * 20 + denominator) / (denominator * 2));
}

Evaluation parse_evaluation_block(std::string_view text) {
  const std::string lowered = to_lower(text);
  std::array<Label, 3> labels = {Label{"Score", {}, 0}, Label{"Feedback", {}, 0}, Label{"Hint", {}, 0}};
  for (auto& label : labels) {
    label.begin = find_label(text, lowered, label.name);
    if (label.begin) label.content_begin = *label.begin + label.name.size() + 1;
  }
  if (!labels[0].begin) fail(text, FailureKind::MissingField, 0, "Score");
  if (!labels[1].begin) fail(text, FailureKind::MissingField, 0, "Feedback");

  auto value_end = [&](const Label& label) {
    std::size_t end = text.size();
    for (const auto& other : labels) {
      if (other.begin && *other.begin > *label.begin) end = std::min(end, *other.begin);
    }
    return end;
  };
  auto value_of = [&](const Label& label) {
    return text.substr(label.content_begin, value_end(label) - label.content_begin);
  };

  // "X/D", spaces allowed around the slash.
  const std::string_view score_text = value_of(labels[0]);
  std::size_t i = 0;
  while (i < score_text.size() && is_space(score_text[i])) ++i;
  const std::size_t score_at = labels[0].content_begin + i;
  auto read_int = [&](long long& out) {
    constexpr std::size_t kMaxDigits = 9;
    std::size_t start = i;
    while (i < score_text.size() && is_digit(score_text[i])) ++i;
    if (i == start || i - start > kMaxDigits) return false;
    out = std::stoll(std::string(score_text.substr(start, i - start)));
    return true;
  };
  long long numerator = 0;
  long long denominator = 0;
  if (!read_int(numerator)) fail(text, FailureKind::MalformedScore, score_at);
  while (i < score_text.size() && is_space(score_text[i])) ++i;
  if (i >= score_text.size() || score_text[i] != '/') fail(text, FailureKind::MalformedScore, score_at);
  ++i;
  while (i < score_text.size() && is_space(score_text[i])) ++i;
  if (!read_int(denominator) || denominator < 1 || numerator > denominator) {
    fail(text, FailureKind::MalformedScore, score_at);
  }

  Evaluation evaluation;
  evaluation.score = normalize_score(numerator, denominator);
  evaluation.feedback = trim(value_of(labels[1]));
  if (evaluation.feedback.empty()) fail(text, FailureKind::MissingField, *labels[1].begin, "Feedback");
  if (labels[2].begin) {
    auto hint = trim(value_of(labels[2]));
    if (!hint.empty()) evaluation.hint = std::move(hint);
  }
  return evaluation;
}

std::vector<QaPair> parse_short_qa_block(std::string_view text) {
  auto markers = find_markers(text, "QA");
  const bool any_question =
      std::any_of(markers.begin(), markers.end(), [](const Marker& m) { return m.letter == 'Q'; });
  if (!any_question) fail(text, FailureKind::NoBlocksFound, 0);

  std::vector<QaPair> pairs;
  std::optional<Marker> open_question;
  int expected = 1;
  auto region = [&](const Marker& m, std::size_t end) {
    return trim(text.substr(m.content_begin, end - m.content_begin));
  };

  for (std::size_t k = 0; k < markers.size(); ++k) {
    const auto& m = markers[k];
    const std::size_t end = k + 1 < markers.size() ? markers[k + 1].begin : text.size();
    if (m.letter == 'Q') {
      if (open_question) fail(text, FailureKind::MissingField, open_question->begin, "An");
      if (m.index != expected) fail(text, FailureKind::IndexGap, m.begin);
      open_question = m;
      QaPair pair;
      pair.index = m.index;
      pair.question_text = region(m, end);
      if (pair.question_text.empty()) fail(text, FailureKind::MissingField, m.begin, "Qn");
      pairs.push_back(std::move(pair));
    } else {
      if (!open_question) {
        fail(text, pairs.empty() ? FailureKind::MissingField : FailureKind::IndexGap, m.begin,
             pairs.empty() ? "Qn" : "");
      }
      if (m.index != expected) fail(text, FailureKind::IndexGap, m.begin);
      auto answer = region(m, end);
      if (answer.empty()) fail(text, FailureKind::MissingField, m.begin, "An");
      pairs.back().answer_text = std::move(answer);
      open_question.reset();
      ++expected;
    }
  }
  if (open_question) fail(text, FailureKind::MissingField, open_question->begin, "An");
  return pairs;
}

BlockKind classify_block(std::string_view text) {
  const std::string lowered = to_lower(text);
  auto q_markers = find_markers(text, "Q");
  auto score = find_label(text, lowered, "Score");
  if (score && (q_markers.empty() || *score < q_markers.front().begin)) return BlockKind::Evaluation;

  std::size_t cursor = 0;
  bool all_options = true;
  for (char label : kOptionLabels) {
    auto pos = find_option_label(text, label, cursor, text.size());
    if (!pos) {
      all_options = false;
      break;
    }
    cursor = *pos + 2;
  }
  if (all_options) return BlockKind::Mcq;

  auto a_markers = find_markers(text, "A");
  if (!q_markers.empty() && !a_markers.empty()) return BlockKind::ShortQa;
  return BlockKind::Unknown;
}

std::string canonical_render(const McqBlock& block) {
  std::string out;
  for (const auto& item : block.questions) {
    if (!out.empty()) out += "\n\n";
    out += "Q" + std::to_string(item.index) + ": " + item.stem;
    for (std::size_t o = 0; o < kOptionLabels.size(); ++o) {
      out += "\n";
      out += kOptionLabels[o];
      out += ") " + item.options[o];
      if (item.correct_label == kOptionLabels[o]) out += "*";
    }
  }
  return out;
}

std::string canonical_render(const std::vector<QaPair>& pairs) {
  std::string out;
  for (const auto& pair : pairs) {
    if (!out.empty()) out += "\n\n";
    const auto n = std::to_string(pair.index);
    out += "Q" + n + ": " + pair.question_text + "\nA" + n + ": " + pair.answer_text;
  }
  return out;
}

std::string canonical_render(const Evaluation& evaluation) {
  std::string out = "Score: " + std::to_string(evaluation.score) + "/10\nFeedback: " + evaluation.feedback;
  if (evaluation.hint) out += "\nHint: " + *evaluation.hint;
  return out;
}

std::vector<std::string> answer_items(const QaPair& pair) {
  std::vector<std::string> items;
  bool seen_lead = false;
  bool lead_introduces_list = false;
  for (const auto& raw : split_lines(pair.answer_text)) {
    auto line = trim(raw);
    if (line.empty()) continue;
    if (!seen_lead) {
      seen_lead = true;
      lead_introduces_list = line.back() == ':';
      continue;
    }
    static constexpr std::string_view kBullet = "\xE2\x80\xA2";
    if (line.front() == '-' || line.front() == '*') {
      items.push_back(trim(std::string_view(line).substr(1)));
    } else if (line.rfind(kBullet, 0) == 0) {
      items.push_back(trim(std::string_view(line).substr(kBullet.size())));
    } else if (lead_introduces_list) {
      items.push_back(line);
    }
  }
  return items;
}

Question to_question(const McqItem& item, DifficultyLevel difficulty) {
  Question q;
  q.kind = QuestionKind::MultipleChoice;
  q.stem = item.stem;
  for (std::size_t o = 0; o < kOptionLabels.size(); ++o) q.options.push_back({kOptionLabels[o], item.options[o]});
  q.correct_label = item.correct_label;
  q.difficulty = difficulty;
  return q;
}

Question to_question(const QaPair& pair, DifficultyLevel difficulty, std::optional<std::string> transfer_domain) {
  Question q;
  q.kind = transfer_domain ? QuestionKind::Transfer : QuestionKind::ShortAnswer;
  q.stem = pair.question_text;
  q.reference_answer = pair.answer_text;
  q.difficulty = difficulty;
  q.transfer_domain = std::move(transfer_domain);
  return q;
}

}  // namespace tutor
