#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hisqa/motion.hpp"
#include "hisqa/scene.hpp"

namespace hisqa {

struct ContactTuple {
    JointId joint;
    std::string object_id;
    double distance;

    friend bool operator==(const ContactTuple&, const ContactTuple&) = default;
};

// Single-anchor orientation of an object relative to the person. The
// two-anchor `between` case is a BetweenPair.
enum class OrientationCategory { FacingTowards, OnLeft, OnRight, FacingAway, At };

std::string_view to_string(OrientationCategory c);
std::optional<OrientationCategory> orientation_from_string(std::string_view s);

struct PositionTriplet {
    OrientationCategory orientation;
    double distance;  // horizontal, pelvis to object center
    std::string object_id;

    friend bool operator==(const PositionTriplet&, const PositionTriplet&) = default;
};

struct BetweenPair {
    std::string left_object_id;
    std::string right_object_id;

    friend bool operator==(const BetweenPair&, const BetweenPair&) = default;
};

struct FrameAnnotation {
    std::size_t frame_index = 0;
    std::vector<ContactTuple> contacts;
    std::vector<PositionTriplet> positions;
    std::vector<BetweenPair> betweens;
};

struct InteractionConfig {
    double contact_epsilon = 0.1;  // meters, strict <
    double at_radius = 0.8;
    double between_radius = 2.0;
    double between_symmetry = kPi / 6.0;  // radians
};

// Sector of a heading angle, ignoring the `at` disk:
// (-pi/4, pi/4] towards, (pi/4, 3pi/4] left, (-3pi/4, -pi/4] right, else away.
OrientationCategory direction_sector(double heading);

// Contacts with distance < epsilon, sorted by (joint index, object id).
std::vector<ContactTuple> detect_contacts(const PoseFrame& frame, const Scene& scene, double epsilon);

struct ClassifiedPosition {
    PositionTriplet triplet;
    std::optional<double> heading;  // empty for At
};

ClassifiedPosition classify_position_detailed(const PoseFrame& frame, const SceneObject& object,
                                              const InteractionConfig& config = {});
PositionTriplet classify_position(const PoseFrame& frame, const SceneObject& object,
                                  const InteractionConfig& config = {});

// Mirrored left/right pairs, sorted by combined distance then ids.
std::vector<BetweenPair> detect_between(const PoseFrame& frame, const Scene& scene,
                                        const InteractionConfig& config = {});

// Positions are listed in scene object order.
FrameAnnotation annotate_frame(const PoseFrame& frame, const Scene& scene, const InteractionConfig& config = {});

// Frames t >= 1 whose contact set differs from frame t-1.
std::vector<std::size_t> contact_change_frames(const MotionSequence& motion, const Scene& scene, double epsilon);

nlohmann::json frame_annotation_to_json(const FrameAnnotation& a);
FrameAnnotation frame_annotation_from_json(const nlohmann::json& j);

}  // namespace hisqa
