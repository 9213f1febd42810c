#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hisqa/interaction.hpp"

namespace hisqa {

// ---- sub-task taxonomy ----

struct SubtaskInfo {
    std::string_view tag;
    std::string_view title;
    bool generatable;  // false for the three human-annotated sub-tasks
};

std::span<const SubtaskInfo> subtasks();
const SubtaskInfo* find_subtask(std::string_view tag);
std::vector<std::string_view> generatable_subtasks();

inline constexpr std::string_view kPromptVersion = "hisqa.prompts/1";

// ---- annotation rendering ----

std::string_view orientation_phrase(OrientationCategory c);

// One line per contact, position and between record, in that order.
std::vector<std::string> render_frame_text(const FrameAnnotation& annotation, const Scene& scene);

struct AnnotationBundle {
    std::string scene_id;
    std::string motion_id;
    std::size_t frame_count = 0;
    std::string activity;
    std::vector<std::string> scene_expressions;
    // frame index -> pose narration lines followed by contact/position lines
    std::map<std::size_t, std::vector<std::string>> frame_texts;
};

// Optional narration hook for body posture; returns lines for one frame.
using PoseNarrator = std::function<std::vector<std::string>(const PoseFrame&)>;

AnnotationBundle make_bundle(const Scene& scene, const MotionSequence& motion, std::string activity,
                             std::span<const FrameAnnotation> annotations, const PoseNarrator& narrator = {});

// ---- prompts ----

// General QA-generation template filled with the sub-task's instruction block.
// Human-annotated sub-tasks raise NotGeneratable; unknown tags UnknownSubtask.
std::string build_qa_prompt(const AnnotationBundle& bundle, std::string_view subtask);

std::string build_judge_prompt(std::string_view question, std::string_view ground_truth,
                               std::string_view candidate_answer);

// Replaces each `{NAME}` for NAME in `values` in one pass; inserted text is not rescanned.
std::string fill_template(std::string_view text, const std::map<std::string, std::string, std::less<>>& values);

// ---- QA records ----

struct QARecord {
    std::string id;  // assigned by the store; may be empty
    std::string question;
    std::string answer;
    std::string subtask;
    std::string scene_id;
    std::string motion_id;
    std::size_t start_frame = 0;
    std::size_t end_frame = 0;

    friend bool operator==(const QARecord&, const QARecord&) = default;
};

// Field name and reason of the first violated invariant, if any.
struct QAViolation {
    std::string field;
    std::string message;
};
std::optional<QAViolation> check_qa_record(const QARecord& r, std::optional<std::size_t> frame_count = std::nullopt);

nlohmann::json qa_record_to_json(const QARecord& r);
// Schema errors for missing or mistyped fields; does not check invariants.
QARecord qa_record_from_json(const nlohmann::json& j);

struct QAContext {
    std::string subtask;
    std::string scene_id;
    std::string motion_id;
    std::size_t start_frame = 0;
    std::size_t end_frame = 0;
    std::size_t frame_count = 0;
};

// Parses the JSON-array response mandated by the QA prompt. Markdown code
// fences around the array are tolerated. Parse errors carry the raw text.
std::vector<QARecord> parse_llm_qa(std::string_view response, const QAContext& context);
std::string qa_response_text(std::span<const QARecord> records);

// ---- LLM access ----

struct LlmSettings {
    std::string endpoint;  // OpenAI-compatible chat completions URL; empty = offline
    std::string model = "gpt-4";
    std::string token_env = "HISQA_LLM_TOKEN";
    double temperature = 0.0;
    double timeout_s = 60.0;
    int retries = 3;
    double backoff_s = 1.0;  // doubled after each failed attempt
    std::size_t max_in_flight = 4;
};

class LlmClient {
public:
    virtual ~LlmClient() = default;
    // Returns the model's text or throws Error(Llm); never returns an empty string.
    virtual std::string send(const std::string& prompt) = 0;
};

class HttpLlmClient final : public LlmClient {
public:
    explicit HttpLlmClient(LlmSettings settings);
    std::string send(const std::string& prompt) override;

private:
    LlmSettings settings_;
};

class RetryingClient final : public LlmClient {
public:
    using Sleeper = std::function<void(std::chrono::duration<double>)>;
    RetryingClient(std::shared_ptr<LlmClient> inner, int retries, double backoff_s, Sleeper sleeper = {});
    std::string send(const std::string& prompt) override;

private:
    std::shared_ptr<LlmClient> inner_;
    int retries_;
    double backoff_s_;
    Sleeper sleeper_;
};

// Offline client answering from recorded prompt/response pairs.
class ReplayClient final : public LlmClient {
public:
    explicit ReplayClient(std::map<std::string, std::string> responses) : responses_(std::move(responses)) {}
    std::string send(const std::string& prompt) override;

private:
    std::map<std::string, std::string> responses_;
};

std::unique_ptr<LlmClient> make_llm_client(const LlmSettings& settings);

struct LlmOutcome {
    std::optional<std::string> response;
    std::string error;
};

// Sends all prompts with at most `max_in_flight` concurrent calls; results
// follow input order.
std::vector<LlmOutcome> send_all(LlmClient& client, std::span<const std::string> prompts, std::size_t max_in_flight);

nlohmann::json transcript_record(std::string_view kind, std::string_view prompt, const LlmOutcome& outcome);

}  // namespace hisqa
