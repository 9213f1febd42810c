#include "hisqa/textgen.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "hisqa/error.hpp"
#include "prompt_assets.hpp"

namespace hisqa {

namespace {

constexpr std::array<SubtaskInfo, 16> kSubtasks = {{
    {"single_activity", "Single Activity", true},
    {"sequential_activity", "Sequential Activity", true},
    {"human_position", "Human Position", true},
    {"body_orientation", "Body Orientation", true},
    {"object_orientation", "Object Orientation", true},
    {"interaction_type", "Interaction Type", true},
    {"interacting_object", "Interacting Object", true},
    {"contact_part", "Contact Part", true},
    {"focus_analysis", "Focus Analysis", false},
    {"situated_analysis", "Situated Analysis", false},
    {"intent_prediction", "Intent Prediction", true},
    {"movement_prediction", "Movement Prediction", true},
    {"situated_dialogue", "Situated Dialogue", true},
    {"high_level_task", "High-level Task", true},
    {"low_level_task", "Low-level Task", true},
    {"navigation", "Navigation", false},
}};

std::string one_decimal(double meters) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", meters);
    return buf;
}

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string bullet_block(const std::vector<std::string>& lines, std::string_view if_empty) {
    if (lines.empty()) return "- " + std::string(if_empty);
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += '\n';
        out += "- " + lines[i];
    }
    return out;
}

}  // namespace

std::span<const SubtaskInfo> subtasks() { return kSubtasks; }

const SubtaskInfo* find_subtask(std::string_view tag) {
    for (const auto& s : kSubtasks) {
        if (s.tag == tag) return &s;
    }
    return nullptr;
}

std::vector<std::string_view> generatable_subtasks() {
    std::vector<std::string_view> tags;
    for (const auto& s : kSubtasks) {
        if (s.generatable) tags.push_back(s.tag);
    }
    return tags;
}

std::string_view orientation_phrase(OrientationCategory c) {
    switch (c) {
        case OrientationCategory::FacingTowards: return "in front of";
        case OrientationCategory::OnLeft: return "on the left of";
        case OrientationCategory::OnRight: return "on the right of";
        case OrientationCategory::FacingAway: return "behind";
        case OrientationCategory::At: return "right next to";
    }
    return "near";
}

std::vector<std::string> render_frame_text(const FrameAnnotation& annotation, const Scene& scene) {
    std::vector<std::string> lines;
    for (const auto& c : annotation.contacts) {
        lines.push_back("The person's " + std::string(joint_name(c.joint)) + " is in contact with the " +
                        scene.object(c.object_id).label + ".");
    }
    for (const auto& p : annotation.positions) {
        lines.push_back("The " + scene.object(p.object_id).label + " is " + std::string(orientation_phrase(p.orientation)) +
                        " the person, about " + one_decimal(p.distance) + " meters away.");
    }
    for (const auto& b : annotation.betweens) {
        lines.push_back("The person is between the " + scene.object(b.left_object_id).label + " and the " +
                        scene.object(b.right_object_id).label + ".");
    }
    return lines;
}

AnnotationBundle make_bundle(const Scene& scene, const MotionSequence& motion, std::string activity,
                             std::span<const FrameAnnotation> annotations, const PoseNarrator& narrator) {
    AnnotationBundle b;
    b.scene_id = scene.id();
    b.motion_id = motion.id();
    b.frame_count = motion.size();
    b.activity = std::move(activity);
    for (const auto& t : build_scene_graph(scene)) b.scene_expressions.push_back(refer_expression(t, scene));
    for (const auto& a : annotations) {
        if (a.frame_index >= motion.size()) {
            throw Error(ErrorCode::ShapeMismatch, "annotation frame outside motion", std::to_string(a.frame_index));
        }
        std::vector<std::string> lines;
        if (narrator) lines = narrator(motion[a.frame_index]);
        for (auto& line : render_frame_text(a, scene)) lines.push_back(std::move(line));
        b.frame_texts[a.frame_index] = std::move(lines);
    }
    return b;
}

std::string fill_template(std::string_view text, const std::map<std::string, std::string, std::less<>>& values) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t open = text.find('{', pos);
        if (open == std::string_view::npos) break;
        const std::size_t close = text.find('}', open + 1);
        if (close == std::string_view::npos) break;
        const auto it = values.find(text.substr(open + 1, close - open - 1));
        if (it == values.end()) {
            out.append(text.substr(pos, open + 1 - pos));
            pos = open + 1;
            continue;
        }
        out.append(text.substr(pos, open - pos));
        out.append(it->second);
        pos = close + 1;
    }
    out.append(text.substr(std::min(pos, text.size())));
    return out;
}

std::string build_qa_prompt(const AnnotationBundle& bundle, std::string_view subtask) {
    const SubtaskInfo* info = find_subtask(subtask);
    if (!info) throw Error(ErrorCode::UnknownSubtask, "unknown sub-task", std::string(subtask));
    if (!info->generatable) {
        throw Error(ErrorCode::NotGeneratable,
                    "sub-task '" + std::string(subtask) +
                        "' is human-annotated; author it in the annotation UI (hisqa serve)",
                    std::string(subtask));
    }
    const auto block = assets::task_block(subtask);
    if (!block) throw Error(ErrorCode::UnknownSubtask, "no instruction block for sub-task", std::string(subtask));

    std::string motion = "Activity: " + bundle.activity;
    for (const auto& [frame, lines] : bundle.frame_texts) {
        motion += "\nFrame " + std::to_string(frame) + ":\n" + bullet_block(lines, "no notable interaction");
    }
    return fill_template(assets::qa_general_template(),
                         {
                             {"SCENE_ANNOTATIONS", bullet_block(bundle.scene_expressions, "no object relations")},
                             {"MOTION_ANNOTATIONS", motion},
                             {"TASK-SPECIFIC PROMPT", std::string(trim(*block))},
                         });
}

std::string build_judge_prompt(std::string_view question, std::string_view ground_truth,
                               std::string_view candidate_answer) {
    return fill_template(assets::judge_template(), {
                                                       {"QUESTION", std::string(question)},
                                                       {"GROUND_TRUTH", std::string(ground_truth)},
                                                       {"ANSWER", std::string(candidate_answer)},
                                                   });
}

std::optional<QAViolation> check_qa_record(const QARecord& r, std::optional<std::size_t> frame_count) {
    if (blank(r.question)) return QAViolation{"question", "question must not be empty"};
    if (blank(r.answer)) return QAViolation{"answer", "answer must not be empty"};
    if (!find_subtask(r.subtask)) return QAViolation{"subtask", "unknown sub-task '" + r.subtask + "'"};
    if (r.scene_id.empty()) return QAViolation{"scene", "scene id must not be empty"};
    if (r.motion_id.empty()) return QAViolation{"motion", "motion id must not be empty"};
    if (r.start_frame > r.end_frame) return QAViolation{"start_frame", "start_frame must not exceed end_frame"};
    if (frame_count && r.end_frame >= *frame_count) {
        return QAViolation{"end_frame", "end_frame must be below the motion length " + std::to_string(*frame_count)};
    }
    return std::nullopt;
}

nlohmann::json qa_record_to_json(const QARecord& r) {
    nlohmann::json j = {
        {"question", r.question},   {"answer", r.answer},       {"subtask", r.subtask},
        {"scene", r.scene_id},      {"motion", r.motion_id},    {"start_frame", r.start_frame},
        {"end_frame", r.end_frame},
    };
    if (!r.id.empty()) j["id"] = r.id;
    return j;
}

QARecord qa_record_from_json(const nlohmann::json& j) {
    try {
        QARecord r;
        if (j.contains("id")) r.id = j.at("id").get<std::string>();
        r.question = j.at("question").get<std::string>();
        r.answer = j.at("answer").get<std::string>();
        r.subtask = j.at("subtask").get<std::string>();
        r.scene_id = j.at("scene").get<std::string>();
        r.motion_id = j.at("motion").get<std::string>();
        r.start_frame = j.at("start_frame").get<std::size_t>();
        r.end_frame = j.at("end_frame").get<std::size_t>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Schema, std::string("malformed QA record: ") + e.what(), j.dump());
    }
}

std::vector<QARecord> parse_llm_qa(std::string_view response, const QAContext& context) {
    const std::string raw(response);
    std::string_view body = trim(response);
    if (body.starts_with("```")) {
        const auto first_newline = body.find('\n');
        const auto closing = body.rfind("```");
        if (first_newline == std::string_view::npos || closing <= first_newline) {
            throw Error(ErrorCode::Parse, "unterminated code fence in LLM response", raw);
        }
        body = trim(body.substr(first_newline + 1, closing - first_newline - 1));
    }

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("LLM response is not valid JSON: ") + e.what(), raw);
    }
    if (!doc.is_array()) throw Error(ErrorCode::Parse, "LLM response must be a JSON array", raw);

    std::vector<QARecord> records;
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("question") || !item.contains("answer") ||
            !item["question"].is_string() || !item["answer"].is_string()) {
            throw Error(ErrorCode::Parse, "each element needs string fields 'question' and 'answer'", raw);
        }
        QARecord r{
            {},
            item["question"].get<std::string>(),
            item["answer"].get<std::string>(),
            context.subtask,
            context.scene_id,
            context.motion_id,
            context.start_frame,
            context.end_frame,
        };
        if (auto bad = check_qa_record(r, context.frame_count)) {
            throw Error(ErrorCode::Parse, "QA record violates " + bad->field + ": " + bad->message, raw);
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::string qa_response_text(std::span<const QARecord> records) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& r : records) doc.push_back({{"question", r.question}, {"answer", r.answer}});
    return doc.dump();
}

}  // namespace hisqa
