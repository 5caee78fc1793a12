#include "helpers.hpp"
#include "tutor/domain.hpp"

#include <doctest.h>

using namespace tutor;

namespace {

SessionEvent ev(EventPayload payload, Timestamp at = 0) { return SessionEvent{std::move(payload), at}; }

SessionState created_state(const std::string& topic = "photosynthesis") {
  return apply_event(SessionState{}, ev(event::SessionCreated{"s1", topic}));
}

SessionState after_turn(int score, Question q = test::short_answer("What is photosynthesis?", 1)) {
  auto s = created_state();
  s = apply_event(s, ev(event::QuestionPosed{q}));
  s = apply_event(s, ev(event::AnswerSubmitted{"an answer"}));
  return apply_event(s, ev(event::Evaluated{{score, "feedback", std::nullopt}}));
}

// The five-event log used by the permutation test.
std::vector<SessionEvent> five_event_log() {
  return {
      ev(event::SessionCreated{"s1", "photosynthesis"}, 1),
      ev(event::QuestionPosed{test::mcq("Which gas do plants absorb?", 'C', 1)}, 2),
      ev(event::AnswerSubmitted{"C"}, 3),
      ev(event::Evaluated{{10, "Correct.", std::nullopt}}, 4),
      ev(event::DifficultyChanged{DifficultyLevel(2)}, 5),
  };
}

}  // namespace

TEST_CASE("topic is trimmed and bounded") {
  CHECK(Topic("  photosynthesis ").text() == "photosynthesis");
  CHECK_THROWS_AS(Topic("   "), ValidationError);
  CHECK_NOTHROW(Topic(std::string(200, 'a')));
  CHECK_THROWS_AS(Topic(std::string(201, 'a')), ValidationError);
}

TEST_CASE("difficulty stays within 1..5") {
  for (int l = 1; l <= 5; ++l) CHECK(DifficultyLevel(l).value() == l);
  CHECK_THROWS_AS(DifficultyLevel(0), ValidationError);
  CHECK_THROWS_AS(DifficultyLevel(6), ValidationError);
  CHECK(DifficultyLevel(5).is_max());
  CHECK(DifficultyLevel().value() == 1);
}

TEST_CASE("question validation follows the kind") {
  CHECK_NOTHROW(validate(test::mcq()));
  CHECK_NOTHROW(validate(test::short_answer()));
  CHECK_NOTHROW(validate(test::transfer()));

  auto q = test::mcq();
  q.options.pop_back();
  CHECK_THROWS_AS(validate(q), ValidationError);
  q = test::mcq();
  q.correct_label = 'E';
  CHECK_THROWS_AS(validate(q), ValidationError);
  q = test::mcq();
  std::swap(q.options[0], q.options[1]);
  CHECK_THROWS_AS(validate(q), ValidationError);
  q = test::short_answer();
  q.reference_answer.reset();
  CHECK_THROWS_AS(validate(q), ValidationError);
  q = test::transfer();
  q.transfer_domain.reset();
  CHECK_THROWS_AS(validate(q), ValidationError);
  q = test::short_answer();
  q.transfer_domain = "art";
  CHECK_THROWS_AS(validate(q), ValidationError);
  q = test::short_answer();
  q.stem = " ";
  CHECK_THROWS_AS(validate(q), ValidationError);
}

TEST_CASE("evaluation score must be 0..10") {
  CHECK_NOTHROW(validate(Evaluation{0, "x", std::nullopt}));
  CHECK_NOTHROW(validate(Evaluation{10, "x", "h"}));
  CHECK_THROWS_AS(validate(Evaluation{11, "x", std::nullopt}), ValidationError);
  CHECK_THROWS_AS(validate(Evaluation{-1, "x", std::nullopt}), ValidationError);
  CHECK_THROWS_AS(validate(Evaluation{5, "", std::nullopt}), ValidationError);
}

TEST_CASE("SessionCreated on the empty state starts practicing at level 1") {
  auto s = created_state();
  REQUIRE(s.topic);
  CHECK(s.topic->text() == "photosynthesis");
  CHECK(s.difficulty.value() == 1);
  CHECK(s.phase == Phase::Practicing);
  CHECK(s.turns.empty());
  CHECK_FALSE(s.pending_question);
  CHECK(s.session_id == "s1");
}

TEST_CASE("answer then evaluation commits one turn and clears the pending question") {
  auto s = created_state();
  s = apply_event(s, ev(event::QuestionPosed{test::short_answer("What is photosynthesis?", 1)}));
  REQUIRE(s.pending_question);
  s = apply_event(s, ev(event::AnswerSubmitted{"Photosynthesis is when plants make food from sunlight."}, 7));
  s = apply_event(s, ev(event::Evaluated{{7, "Your answer is partially correct.", "Try to include more details"}}, 9));
  REQUIRE(s.turns.size() == 1);
  CHECK_FALSE(s.pending_question);
  CHECK_FALSE(s.pending_answer);
  CHECK(s.turns[0].evaluation.score == 7);
  CHECK(s.turns[0].student_answer == "Photosynthesis is when plants make food from sunlight.");
  CHECK(s.turns[0].timestamp == 9);
}

TEST_CASE("illegal events are rejected") {
  SUBCASE("anything before SessionCreated") {
    CHECK_THROWS_AS(apply_event(SessionState{}, ev(event::AnswerSubmitted{"x"})), IllegalTransition);
  }
  SUBCASE("second SessionCreated") {
    CHECK_THROWS_AS(apply_event(created_state(), ev(event::SessionCreated{"s2", "x"})), IllegalTransition);
  }
  SUBCASE("answer without a question") {
    CHECK_THROWS_AS(apply_event(created_state(), ev(event::AnswerSubmitted{"x"})), IllegalTransition);
  }
  SUBCASE("blank answer") {
    auto s = apply_event(created_state(), ev(event::QuestionPosed{test::mcq()}));
    CHECK_THROWS_AS(apply_event(s, ev(event::AnswerSubmitted{"  "})), IllegalTransition);
  }
  SUBCASE("question at the wrong level") {
    CHECK_THROWS_AS(apply_event(created_state(), ev(event::QuestionPosed{test::mcq("x", 'A', 2)})),
                    IllegalTransition);
  }
  SUBCASE("transfer question while practicing") {
    CHECK_THROWS_AS(apply_event(created_state(), ev(event::QuestionPosed{test::transfer("art", 1)})),
                    IllegalTransition);
  }
  SUBCASE("difficulty jumps by two") {
    CHECK_THROWS_AS(apply_event(after_turn(10), ev(event::DifficultyChanged{DifficultyLevel(3)})),
                    IllegalTransition);
  }
  SUBCASE("adaptation while a question is pending") {
    auto s = apply_event(after_turn(10), ev(event::QuestionPosed{test::mcq()}));
    CHECK_THROWS_AS(apply_event(s, ev(event::DifficultyChanged{DifficultyLevel(2)})), IllegalTransition);
  }
  SUBCASE("streak longer than the turn count") {
    CHECK_THROWS_AS(apply_event(after_turn(10), ev(event::StreakChanged{2})), IllegalTransition);
  }
  SUBCASE("practicing straight to mastered") {
    CHECK_THROWS_AS(apply_event(after_turn(10), ev(event::PhaseChanged{Phase::Mastered})), IllegalTransition);
  }
  SUBCASE("invalid evaluation") {
    auto s = apply_event(created_state(), ev(event::QuestionPosed{test::mcq()}));
    s = apply_event(s, ev(event::AnswerSubmitted{"A"}));
    CHECK_THROWS_AS(apply_event(s, ev(event::Evaluated{{12, "x", std::nullopt}})), IllegalTransition);
  }
}

TEST_CASE("mastered sessions accept no further events") {
  auto s = after_turn(10);
  s.phase = Phase::Transferring;
  s = apply_event(s, ev(event::PhaseChanged{Phase::Mastered}));
  CHECK(s.phase == Phase::Mastered);
  CHECK_THROWS_AS(apply_event(s, ev(event::QuestionPosed{test::mcq()})), IllegalTransition);
  CHECK_THROWS_AS(apply_event(s, ev(event::PhaseChanged{Phase::Practicing})), IllegalTransition);
}

TEST_CASE("transfer passes require a matching transfer turn") {
  auto s = created_state();
  s.difficulty = DifficultyLevel(5);
  s.phase = Phase::Transferring;
  s = apply_event(s, ev(event::QuestionPosed{test::transfer("art")}));
  s = apply_event(s, ev(event::AnswerSubmitted{"x"}));
  s = apply_event(s, ev(event::Evaluated{{9, "good", std::nullopt}}));
  CHECK_THROWS_AS(apply_event(s, ev(event::TransferPassed{"history"})), IllegalTransition);
  s = apply_event(s, ev(event::TransferPassed{"art"}));
  CHECK(s.transfer_passes == std::set<std::string>{"art"});
  CHECK(used_transfer_domains(s) == std::set<std::string>{"art"});
}

TEST_CASE("replay of a single SessionCreated gives the fresh state") {
  CHECK(replay({ev(event::SessionCreated{"s1", "photosynthesis"})}) == created_state());
  CHECK_THROWS_AS(replay({}), IllegalTransition);
}

TEST_CASE("replay of a one-turn photosynthesis log records score 7") {
  std::vector<SessionEvent> log = {
      ev(event::SessionCreated{"s1", "photosynthesis"}, 1),
      ev(event::QuestionPosed{test::short_answer("What is photosynthesis?", 1)}, 2),
      ev(event::AnswerSubmitted{"Photosynthesis is when plants make food from sunlight."}, 3),
      ev(event::Evaluated{{7, "Your answer is partially correct.", "Try to include more details"}}, 4),
  };
  auto s = replay(log);
  REQUIRE(s.turns.size() == 1);
  CHECK(s.turns[0].evaluation.score == 7);
  CHECK(s.turns[0].question.stem == "What is photosynthesis?");
}

TEST_CASE("replay reports the index of the offending event") {
  auto log = five_event_log();
  std::swap(log[2], log[3]);
  try {
    replay(log);
    FAIL("replay accepted a reordered log");
  } catch (const IllegalTransition& e) {
    REQUIRE(e.index);
    CHECK(*e.index == 2);
  }
}

TEST_CASE("of all ordered event pairs from a valid log only the in-order prefix replays") {
  const auto log = five_event_log();
  REQUIRE_NOTHROW(replay(log));
  int accepted = 0;
  int pairs = 0;
  for (std::size_t i = 0; i < log.size(); ++i) {
    for (std::size_t j = 0; j < log.size(); ++j) {
      if (i == j) continue;
      ++pairs;
      bool ok = true;
      try {
        replay({log[i], log[j]});
      } catch (const IllegalTransition&) {
        ok = false;
      }
      const bool is_prefix = i == 0 && j == 1;
      CAPTURE(i);
      CAPTURE(j);
      CHECK(ok == is_prefix);
      accepted += ok ? 1 : 0;
    }
  }
  CHECK(pairs == 20);
  CHECK(accepted == 1);
}
