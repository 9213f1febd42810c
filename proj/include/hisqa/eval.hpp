#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace hisqa {

struct ScoreRecord {
    std::string question_id;
    int score = 0;  // 0, 1 or 2
    std::string subtask;
};

// Last standalone integer on the final non-empty line; must be 0, 1 or 2.
// Anything else raises JudgeFormat with the raw text as detail.
int parse_judge_score(std::string_view judge_output);

// Sum of scores scaled so that all-2 maps to 100. Records must share one sub-task.
double task_score(std::span<const ScoreRecord> records);

// Unweighted mean over the given sub-tasks.
double average_score(const std::map<std::string, double, std::less<>>& task_scores);

// Sample Pearson correlation. Requires equal lengths >= 2 and non-constant inputs.
double pearson(std::span<const double> x, std::span<const double> y);

struct EvalReport {
    std::map<std::string, double, std::less<>> per_task;
    double average = 0.0;
    std::size_t parse_failures = 0;
    std::vector<std::string> failed_question_ids;
};

// Groups by sub-task; parse failures are reported, never scored.
EvalReport build_report(std::span<const ScoreRecord> records, std::size_t parse_failures = 0,
                        std::vector<std::string> failed_question_ids = {});

nlohmann::json report_to_json(const EvalReport& report);
nlohmann::json score_record_to_json(const ScoreRecord& r);
ScoreRecord score_record_from_json(const nlohmann::json& j);

}  // namespace hisqa
