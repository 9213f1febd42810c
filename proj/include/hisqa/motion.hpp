#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hisqa/geometry.hpp"

namespace hisqa {

// The 22-joint skeleton; the enumerator value is the joint's index in a frame.
enum class JointId : unsigned char {
    Pelvis,
    LeftHip,
    RightHip,
    LowerSpine,
    LeftKnee,
    RightKnee,
    MiddleSpine,
    LeftAnkle,
    RightAnkle,
    UpperSpine,
    LeftFoot,
    RightFoot,
    Neck,
    LeftCollar,
    RightCollar,
    Head,
    LeftShoulder,
    RightShoulder,
    LeftElbow,
    RightElbow,
    LeftWrist,
    RightWrist,
};

inline constexpr std::size_t kJointCount = 22;

// Lower-case, space separated ("left wrist").
std::string_view joint_name(JointId joint);
std::optional<JointId> joint_from_name(std::string_view name);
inline JointId joint_at(std::size_t index) { return static_cast<JointId>(index); }
inline std::size_t joint_index(JointId joint) { return static_cast<std::size_t>(joint); }

struct PoseFrame {
    std::array<Vec3, kJointCount> joints{};
    std::size_t frame_index = 0;

    const Vec3& operator[](JointId j) const { return joints[joint_index(j)]; }
    Vec3& operator[](JointId j) { return joints[joint_index(j)]; }
};

class MotionSequence {
public:
    // Validates T >= 1, fps > 0, finite joints and frame_index == position.
    MotionSequence(std::string id, double fps, std::vector<PoseFrame> frames);

    const std::string& id() const { return id_; }
    double fps() const { return fps_; }
    std::size_t size() const { return frames_.size(); }
    std::span<const PoseFrame> frames() const { return frames_; }
    const PoseFrame& operator[](std::size_t t) const { return frames_.at(t); }

private:
    std::string id_;
    double fps_;
    std::vector<PoseFrame> frames_;
};

// Per-frame location used by the position encodings: the pelvis.
Vec3 frame_location(const PoseFrame& frame);

inline constexpr double kDefaultHipDegeneracy = 1e-3;

// Horizontal unit vector up x (right - left), from the hips, falling back to
// the shoulders when the hips are horizontally coincident.
Vec2 facing_direction(const PoseFrame& frame, double degeneracy = kDefaultHipDegeneracy);

// {0, stride, 2*stride, ...} U {T-1} U extra, ascending and deduplicated.
// Entries of `extra` outside [0, T) are ignored.
std::vector<std::size_t> select_key_frames(const MotionSequence& motion, std::size_t stride,
                                           std::span<const std::size_t> extra = {});

MotionSequence motion_from_json(const nlohmann::json& doc);
nlohmann::json motion_to_json(const MotionSequence& motion);
MotionSequence load_motion(const std::filesystem::path& path);

}  // namespace hisqa
