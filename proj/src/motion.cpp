#include "hisqa/motion.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "hisqa/error.hpp"

namespace hisqa {

namespace {

constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "pelvis",        "left hip",       "right hip",      "lower spine",  "left knee",
    "right knee",    "middle spine",   "left ankle",     "right ankle",  "upper spine",
    "left foot",     "right foot",     "neck",           "left collar",  "right collar",
    "head",          "left shoulder",  "right shoulder", "left elbow",   "right elbow",
    "left wrist",    "right wrist",
};

std::optional<Vec2> facing_from_pair(const Vec3& left, const Vec3& right, double degeneracy) {
    const Vec3 across = right - left;
    // up x across, with up = +z
    const Vec2 facing{-across.y, across.x};
    const double norm = facing.norm();
    if (!(norm > degeneracy)) return std::nullopt;
    return Vec2{facing.x / norm, facing.y / norm};
}

Vec3 vec3_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw Error(ErrorCode::Schema, "expected [x, y, z]");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::string_view joint_name(JointId joint) { return kJointNames.at(joint_index(joint)); }

std::optional<JointId> joint_from_name(std::string_view name) {
    const auto it = std::find(kJointNames.begin(), kJointNames.end(), name);
    if (it == kJointNames.end()) return std::nullopt;
    return joint_at(static_cast<std::size_t>(it - kJointNames.begin()));
}

MotionSequence::MotionSequence(std::string id, double fps, std::vector<PoseFrame> frames)
    : id_(std::move(id)), fps_(fps), frames_(std::move(frames)) {
    if (frames_.empty()) {
        throw Error(ErrorCode::Precondition, "motion sequence has no frames", id_);
    }
    if (!(fps_ > 0.0) || !std::isfinite(fps_)) {
        throw Error(ErrorCode::Schema, "motion fps must be positive", id_);
    }
    for (std::size_t t = 0; t < frames_.size(); ++t) {
        if (frames_[t].frame_index != t) {
            throw Error(ErrorCode::Schema, "frame indices must run 0..T-1", std::to_string(t));
        }
        for (const Vec3& joint : frames_[t].joints) {
            if (!joint.finite()) {
                throw Error(ErrorCode::Schema, "non-finite joint position", "frame " + std::to_string(t));
            }
        }
    }
}

Vec3 frame_location(const PoseFrame& frame) { return frame[JointId::Pelvis]; }

Vec2 facing_direction(const PoseFrame& frame, double degeneracy) {
    if (auto hips = facing_from_pair(frame[JointId::LeftHip], frame[JointId::RightHip], degeneracy)) {
        return *hips;
    }
    if (auto shoulders =
            facing_from_pair(frame[JointId::LeftShoulder], frame[JointId::RightShoulder], degeneracy)) {
        return *shoulders;
    }
    throw Error(ErrorCode::DegeneratePose, "hips and shoulders are both horizontally degenerate",
                "frame " + std::to_string(frame.frame_index));
}

std::vector<std::size_t> select_key_frames(const MotionSequence& motion, std::size_t stride,
                                           std::span<const std::size_t> extra) {
    if (stride == 0) {
        throw Error(ErrorCode::Precondition, "key frame stride must be >= 1");
    }
    const std::size_t count = motion.size();
    std::vector<std::size_t> keys;
    for (std::size_t t = 0; t < count; t += stride) keys.push_back(t);
    keys.push_back(count - 1);
    for (std::size_t t : extra) {
        if (t < count) keys.push_back(t);
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return keys;
}

MotionSequence motion_from_json(const nlohmann::json& doc) {
    try {
        const std::string id = doc.at("id").get<std::string>();
        const double fps = doc.at("fps").get<double>();
        const auto& joints = doc.at("joints");
        if (!joints.is_array()) throw Error(ErrorCode::Schema, "motion 'joints' must be an array", id);
        std::vector<PoseFrame> frames;
        frames.reserve(joints.size());
        for (std::size_t t = 0; t < joints.size(); ++t) {
            const auto& row = joints[t];
            if (!row.is_array() || row.size() != kJointCount) {
                throw Error(ErrorCode::Schema, "frame must have exactly 22 joints",
                            id + " frame " + std::to_string(t));
            }
            PoseFrame frame;
            frame.frame_index = t;
            for (std::size_t j = 0; j < kJointCount; ++j) frame.joints[j] = vec3_from_json(row[j]);
            frames.push_back(frame);
        }
        return MotionSequence(id, fps, std::move(frames));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Schema, std::string("malformed motion document: ") + e.what());
    }
}

nlohmann::json motion_to_json(const MotionSequence& motion) {
    nlohmann::json frames = nlohmann::json::array();
    for (const PoseFrame& f : motion.frames()) {
        nlohmann::json row = nlohmann::json::array();
        for (const Vec3& p : f.joints) row.push_back({p.x, p.y, p.z});
        frames.push_back(std::move(row));
    }
    return {{"id", motion.id()}, {"fps", motion.fps()}, {"joints", std::move(frames)}};
}

MotionSequence load_motion(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open motion file", path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Schema, std::string("invalid JSON: ") + e.what(), path.string());
    }
    return motion_from_json(doc);
}

}  // namespace hisqa
