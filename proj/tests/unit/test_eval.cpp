#include <doctest.h>

#include <nlohmann/json.hpp>

#include "hisqa/error.hpp"
#include "hisqa/eval.hpp"
#include "synth.hpp"

using namespace hisqa;

namespace {

std::vector<ScoreRecord> records(std::vector<int> scores, std::string task = "single_activity") {
    std::vector<ScoreRecord> out;
    for (std::size_t i = 0; i < scores.size(); ++i) out.push_back({"q" + std::to_string(i), scores[i], task});
    return out;
}

}  // namespace

TEST_CASE("judge score parsing") {
    CHECK(parse_judge_score("2") == 2);
    CHECK(parse_judge_score("The answer matches.\nScore: 1\n\n") == 1);
    CHECK(parse_judge_score("Reasoning mentions 2 objects.\n0") == 0);
    CHECK(parse_judge_score("final 1 then 2") == 2);
    for (std::string bad : {"", "3", "Score: two", "1\nno digits here", "-1", "1.5", "2a"}) {
        try {
            parse_judge_score(bad);
            FAIL("expected JudgeFormat for " << bad);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::JudgeFormat);
            CHECK(e.detail() == bad);
        }
    }
}

TEST_CASE("task score arithmetic") {
    CHECK(task_score(records(std::vector<int>(50, 2))) == 100.0);
    CHECK(task_score(records({2, 2, 2, 2, 2, 2, 0, 0, 0, 0})) == 60.0);
    CHECK(task_score(records({0, 0})) == 0.0);
    CHECK(task_score(records({1})) == 50.0);
    CHECK_THROWS_AS(task_score(records({})), Error);
    auto mixed = records({1, 1});
    mixed[1].subtask = "other";
    CHECK_THROWS_AS(task_score(mixed), Error);
    CHECK_THROWS_AS(task_score(records({3})), Error);
}

TEST_CASE("average of equal task scores is exact") {
    std::map<std::string, double, std::less<>> scores;
    for (int i = 0; i < 16; ++i) scores["t" + std::to_string(i)] = 48.7;
    CHECK(std::abs(average_score(scores) - 48.7) < 1e-12);
    CHECK_THROWS_AS(average_score({}), Error);
}

TEST_CASE("pearson correlation") {
    hisqa::testing::Rng rng(71);
    std::vector<double> x, neg, affine;
    for (int i = 0; i < 100; ++i) {
        x.push_back(hisqa::testing::uniform(rng, -5, 5));
        neg.push_back(-x.back());
        affine.push_back(3.0 * x.back() + 7.0);
    }
    CHECK(std::abs(pearson(x, x) - 1.0) < 1e-12);
    CHECK(std::abs(pearson(x, neg) + 1.0) < 1e-12);
    CHECK(std::abs(pearson(x, affine) - 1.0) < 1e-12);
    const std::vector<double> a{1, 2, 3, 4}, b{2, 1, 4, 3};
    CHECK(pearson(a, b) == doctest::Approx(0.6));
    const std::vector<double> flat{1, 1, 1, 1};
    try {
        pearson(a, flat);
        FAIL("expected UndefinedCorrelation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UndefinedCorrelation);
    }
    CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), Error);
    CHECK_THROWS_AS(pearson(a, std::vector<double>{1, 2}), Error);
}

TEST_CASE("report groups by sub-task and reports failures") {
    auto r = records({2, 2, 1, 1}, "a");
    auto b = records({0, 2}, "b");
    r.insert(r.end(), b.begin(), b.end());
    const EvalReport rep = build_report(r, 1, {"q9"});
    CHECK(rep.per_task.at("a") == 75.0);
    CHECK(rep.per_task.at("b") == 50.0);
    CHECK(rep.average == 62.5);
    CHECK(rep.parse_failures == 1);
    const auto j = report_to_json(rep);
    CHECK(j.at("per_task").at("a") == 75.0);
    CHECK(j.at("failed_question_ids")[0] == "q9");

    const ScoreRecord s{"q1", 2, "a"};
    const auto back = score_record_from_json(score_record_to_json(s));
    CHECK(back.question_id == "q1");
    CHECK(back.score == 2);
    auto bad = score_record_to_json(s);
    bad["score"] = 5;
    CHECK_THROWS_AS(score_record_from_json(bad), Error);
}
