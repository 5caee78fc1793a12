#pragma once

#include "tutor/domain.hpp"
#include "tutor/response_parser.hpp"

#include <random>
#include <string>
#include <vector>

namespace gen {

// Small hand-rolled generators over a seeded engine. Vocabulary is chosen so
// that no word can be mistaken for a structural marker ("Q1:", "A)", "Score:").
class Source {
public:
  explicit Source(std::uint64_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[static_cast<std::size_t>(uniform(0, static_cast<int>(items.size()) - 1))];
  }

  std::string word() {
    static const std::vector<std::string> kWords = {
        "light",  "energy",   "chlorophyll", "glucose", "carbon",   "dioxide",  "water",    "leaf",
        "plant",  "cell",     "stroma",      "thylakoid", "ATP",    "NADPH",    "oxygen",   "sugar",
        "enzyme", "Rubisco",  "Calvin",      "cycle",   "(CO2)",    "H2O",      "6",        "C6H12O6",
        "is",     "the",      "of",          "and",     "in",       "which",    "does",     "why",
        "how",    "a",        "an",          "B12",     "Q",        "A",        "x-ray",    "45%",
        "café",   "über",     "naïve",       "\"quoted\"", "it's",  "e.g.",     "3:1",      "1/2",
        "Q&A",    "A-level",  "step-by-step", "re-use", "co-factor", "(a)",     "[b]",      "{c}",
    };
    return pick(kWords);
  }

  std::string phrase(int min_words, int max_words) {
    std::string out;
    const int n = uniform(min_words, max_words);
    for (int i = 0; i < n; ++i) {
      if (i > 0) out += ' ';
      out += word();
    }
    return out;
  }

  std::string sentence() {
    std::string s = phrase(2, 10);
    static const std::vector<std::string> kEnds = {".", "?", "!", "", ";"};
    return s + pick(kEnds);
  }

  std::mt19937_64& engine() { return rng_; }

private:
  std::mt19937_64 rng_;
};

inline tutor::McqItem mcq_item(Source& s, int index) {
  tutor::McqItem item;
  item.index = index;
  item.stem = s.sentence();
  for (auto& option : item.options) option = s.phrase(1, 5);
  item.correct_label = tutor::kOptionLabels[static_cast<std::size_t>(s.uniform(0, 3))];
  return item;
}

inline tutor::McqBlock mcq_block(Source& s) {
  tutor::McqBlock block;
  const int n = s.uniform(1, 5);
  for (int i = 1; i <= n; ++i) block.questions.push_back(mcq_item(s, i));
  return block;
}

inline std::string answer_text(Source& s) {
  if (!s.chance(0.3)) return s.sentence();
  std::string out = s.phrase(2, 6) + ":";
  const int items = s.uniform(1, 4);
  for (int i = 0; i < items; ++i) {
    out += "\n";
    out += s.chance(0.5) ? "- " : "";
    out += s.sentence();
  }
  return out;
}

inline std::vector<tutor::QaPair> qa_pairs(Source& s) {
  std::vector<tutor::QaPair> pairs;
  const int n = s.uniform(1, 4);
  for (int i = 1; i <= n; ++i) pairs.push_back({i, s.sentence(), answer_text(s)});
  return pairs;
}

inline tutor::Evaluation evaluation(Source& s) {
  tutor::Evaluation e;
  e.score = s.uniform(0, 10);
  e.feedback = s.sentence();
  if (s.chance(0.5)) e.feedback += " " + s.sentence();
  if (s.chance(0.6)) e.hint = s.sentence();
  return e;
}

// Same MCQ content in the single-line layout providers often produce.
inline std::string inline_render(const tutor::McqBlock& block) {
  std::string out;
  for (const auto& item : block.questions) {
    if (!out.empty()) out += "\n\n";
    out += "Q" + std::to_string(item.index) + ": " + item.stem;
    for (std::size_t o = 0; o < 4; ++o) {
      out += ' ';
      out += tutor::kOptionLabels[o];
      out += ") " + item.options[o];
      if (item.correct_label == tutor::kOptionLabels[o]) out += "*";
    }
  }
  return out;
}

inline std::string inline_render(const tutor::Evaluation& e) {
  std::string out = "Score: " + std::to_string(e.score) + "/10 Feedback: " + e.feedback;
  if (e.hint) out += " Hint: " + *e.hint;
  return out;
}

}  // namespace gen
