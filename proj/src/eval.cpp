#include "hisqa/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <optional>

#include <nlohmann/json.hpp>

#include "hisqa/error.hpp"

namespace hisqa {

namespace {

// signs stay attached so "-1" is not read as 1
bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-' || c == '+';
}

}  // namespace

int parse_judge_score(std::string_view judge_output) {
    const std::string raw(judge_output);
    std::string_view line;
    std::string_view rest = judge_output;
    while (!rest.empty()) {
        const std::size_t nl = rest.find('\n');
        std::string_view candidate = rest.substr(0, nl);
        if (std::any_of(candidate.begin(), candidate.end(), [](unsigned char c) { return !std::isspace(c); })) {
            line = candidate;
        }
        if (nl == std::string_view::npos) break;
        rest.remove_prefix(nl + 1);
    }
    if (line.empty()) throw Error(ErrorCode::JudgeFormat, "judge output is empty", raw);

    std::optional<std::string_view> last;
    for (std::size_t i = 0; i < line.size();) {
        if (!is_word_char(line[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < line.size() && is_word_char(line[j])) ++j;
        std::string_view token = line.substr(i, j - i);
        while (!token.empty() && token.back() == '.') token.remove_suffix(1);
        if (!token.empty() && std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c); })) {
            last = token;
        }
        i = j;
    }
    if (!last) throw Error(ErrorCode::JudgeFormat, "no integer score on the final line", raw);
    if (*last == "0") return 0;
    if (*last == "1") return 1;
    if (*last == "2") return 2;
    throw Error(ErrorCode::JudgeFormat, "judge score must be 0, 1 or 2", raw);
}

double task_score(std::span<const ScoreRecord> records) {
    if (records.empty()) throw Error(ErrorCode::Precondition, "task score needs at least one record");
    long total = 0;
    for (const auto& r : records) {
        if (r.subtask != records.front().subtask) {
            throw Error(ErrorCode::Precondition, "records span more than one sub-task", r.subtask);
        }
        if (r.score < 0 || r.score > 2) {
            throw Error(ErrorCode::OutOfRange, "score must be 0, 1 or 2", r.question_id);
        }
        total += r.score;
    }
    return 100.0 * static_cast<double>(total) / (2.0 * static_cast<double>(records.size()));
}

double average_score(const std::map<std::string, double, std::less<>>& task_scores) {
    if (task_scores.empty()) throw Error(ErrorCode::Precondition, "average needs at least one task score");
    double sum = 0.0;
    for (const auto& [tag, score] : task_scores) sum += score;
    return sum / static_cast<double>(task_scores.size());
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorCode::Precondition, "pearson inputs differ in length");
    if (x.size() < 2) throw Error(ErrorCode::Precondition, "pearson needs at least two samples");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw Error(ErrorCode::UndefinedCorrelation, "pearson correlation is undefined for constant input");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

EvalReport build_report(std::span<const ScoreRecord> records, std::size_t parse_failures,
                        std::vector<std::string> failed_question_ids) {
    std::map<std::string, std::vector<ScoreRecord>, std::less<>> groups;
    for (const auto& r : records) groups[r.subtask].push_back(r);
    EvalReport report;
    for (const auto& [tag, group] : groups) report.per_task[tag] = task_score(group);
    report.average = report.per_task.empty() ? 0.0 : average_score(report.per_task);
    report.parse_failures = parse_failures;
    report.failed_question_ids = std::move(failed_question_ids);
    return report;
}

nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json per_task = nlohmann::json::object();
    for (const auto& [tag, score] : report.per_task) per_task[tag] = score;
    return {
        {"per_task", per_task},
        {"average", report.per_task.empty() ? nlohmann::json(nullptr) : nlohmann::json(report.average)},
        {"parse_failures", report.parse_failures},
        {"failed_question_ids", report.failed_question_ids},
    };
}

nlohmann::json score_record_to_json(const ScoreRecord& r) {
    return {{"question_id", r.question_id}, {"score", r.score}, {"subtask", r.subtask}};
}

ScoreRecord score_record_from_json(const nlohmann::json& j) {
    try {
        ScoreRecord r{j.at("question_id").get<std::string>(), j.at("score").get<int>(), j.at("subtask").get<std::string>()};
        if (r.score < 0 || r.score > 2) throw Error(ErrorCode::OutOfRange, "score must be 0, 1 or 2", r.question_id);
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Schema, std::string("malformed score record: ") + e.what(), j.dump());
    }
}

}  // namespace hisqa
