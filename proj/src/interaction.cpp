#include "hisqa/interaction.hpp"

#include <algorithm>
#include <array>
#include <tuple>

#include <nlohmann/json.hpp>

#include "hisqa/error.hpp"

namespace hisqa {

namespace {

constexpr std::array<std::string_view, 5> kOrientationNames = {
    "facing_towards", "on_the_left", "on_the_right", "facing_away", "at",
};

}  // namespace

std::string_view to_string(OrientationCategory c) { return kOrientationNames.at(static_cast<std::size_t>(c)); }

std::optional<OrientationCategory> orientation_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kOrientationNames.size(); ++i) {
        if (kOrientationNames[i] == s) return static_cast<OrientationCategory>(i);
    }
    return std::nullopt;
}

OrientationCategory direction_sector(double heading) {
    constexpr double quarter = kPi / 4.0;
    constexpr double three_quarters = 3.0 * kPi / 4.0;
    if (heading > -quarter && heading <= quarter) return OrientationCategory::FacingTowards;
    if (heading > quarter && heading <= three_quarters) return OrientationCategory::OnLeft;
    if (heading > -three_quarters && heading <= -quarter) return OrientationCategory::OnRight;
    return OrientationCategory::FacingAway;
}

std::vector<ContactTuple> detect_contacts(const PoseFrame& frame, const Scene& scene, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw Error(ErrorCode::Precondition, "contact epsilon must be positive");
    }
    std::vector<std::size_t> order(scene.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scene[a].id < scene[b].id; });

    std::vector<ContactTuple> contacts;
    for (std::size_t j = 0; j < kJointCount; ++j) {
        for (std::size_t i : order) {
            const SceneObject& object = scene[i];
            const double d = nearest_distance(frame.joints[j], object.cloud);
            if (d < epsilon) contacts.push_back({joint_at(j), object.id, d});
        }
    }
    return contacts;
}

ClassifiedPosition classify_position_detailed(const PoseFrame& frame, const SceneObject& object,
                                              const InteractionConfig& config) {
    const Vec3 pelvis = frame_location(frame);
    const double d = horizontal_distance(pelvis, object.box.center);
    if (d < config.at_radius) {
        return {{OrientationCategory::At, d, object.id}, std::nullopt};
    }
    const Vec2 facing = facing_direction(frame);
    const Vec2 to_object{object.box.center.x - pelvis.x, object.box.center.y - pelvis.y};
    const double heading = signed_heading_angle(facing, to_object);
    return {{direction_sector(heading), d, object.id}, heading};
}

PositionTriplet classify_position(const PoseFrame& frame, const SceneObject& object, const InteractionConfig& config) {
    return classify_position_detailed(frame, object, config).triplet;
}

std::vector<BetweenPair> detect_between(const PoseFrame& frame, const Scene& scene, const InteractionConfig& config) {
    std::vector<ClassifiedPosition> left, right;
    for (const SceneObject& object : scene.objects()) {
        ClassifiedPosition c = classify_position_detailed(frame, object, config);
        if (c.triplet.distance >= config.between_radius) continue;
        if (c.triplet.orientation == OrientationCategory::OnLeft) left.push_back(std::move(c));
        if (c.triplet.orientation == OrientationCategory::OnRight) right.push_back(std::move(c));
    }

    struct Candidate {
        double combined;
        BetweenPair pair;
    };
    std::vector<Candidate> found;
    for (const auto& a : left) {
        for (const auto& b : right) {
            if (std::abs(*a.heading + *b.heading) < config.between_symmetry) {
                found.push_back({a.triplet.distance + b.triplet.distance, {a.triplet.object_id, b.triplet.object_id}});
            }
        }
    }
    std::sort(found.begin(), found.end(), [](const Candidate& l, const Candidate& r) {
        return std::tie(l.combined, l.pair.left_object_id, l.pair.right_object_id) <
               std::tie(r.combined, r.pair.left_object_id, r.pair.right_object_id);
    });
    std::vector<BetweenPair> pairs;
    pairs.reserve(found.size());
    for (auto& c : found) pairs.push_back(std::move(c.pair));
    return pairs;
}

FrameAnnotation annotate_frame(const PoseFrame& frame, const Scene& scene, const InteractionConfig& config) {
    try {
        FrameAnnotation a;
        a.frame_index = frame.frame_index;
        a.contacts = detect_contacts(frame, scene, config.contact_epsilon);
        for (const SceneObject& object : scene.objects()) {
            a.positions.push_back(classify_position(frame, object, config));
        }
        a.betweens = detect_between(frame, scene, config);
        return a;
    } catch (const Error& e) {
        throw Error(e.code(), std::string(e.what()) + " (frame " + std::to_string(frame.frame_index) + ")",
                    e.detail());
    }
}

std::vector<std::size_t> contact_change_frames(const MotionSequence& motion, const Scene& scene, double epsilon) {
    std::vector<std::size_t> changes;
    auto key = [](const std::vector<ContactTuple>& contacts) {
        std::vector<std::pair<JointId, std::string>> k;
        for (const auto& c : contacts) k.emplace_back(c.joint, c.object_id);
        return k;
    };
    auto previous = key(detect_contacts(motion[0], scene, epsilon));
    for (std::size_t t = 1; t < motion.size(); ++t) {
        auto current = key(detect_contacts(motion[t], scene, epsilon));
        if (current != previous) changes.push_back(t);
        previous = std::move(current);
    }
    return changes;
}

nlohmann::json frame_annotation_to_json(const FrameAnnotation& a) {
    nlohmann::json contacts = nlohmann::json::array();
    for (const auto& c : a.contacts) {
        contacts.push_back({{"joint", joint_name(c.joint)}, {"object", c.object_id}, {"distance", c.distance}});
    }
    nlohmann::json positions = nlohmann::json::array();
    for (const auto& p : a.positions) {
        positions.push_back({{"object", p.object_id}, {"orientation", to_string(p.orientation)}, {"distance", p.distance}});
    }
    nlohmann::json betweens = nlohmann::json::array();
    for (const auto& b : a.betweens) betweens.push_back({{"left", b.left_object_id}, {"right", b.right_object_id}});
    return {{"frame", a.frame_index}, {"contacts", contacts}, {"positions", positions}, {"betweens", betweens}};
}

FrameAnnotation frame_annotation_from_json(const nlohmann::json& j) {
    try {
        FrameAnnotation a;
        a.frame_index = j.at("frame").get<std::size_t>();
        for (const auto& c : j.at("contacts")) {
            const auto joint = joint_from_name(c.at("joint").get<std::string>());
            if (!joint) throw Error(ErrorCode::Schema, "unknown joint name", c.at("joint").get<std::string>());
            a.contacts.push_back({*joint, c.at("object").get<std::string>(), c.at("distance").get<double>()});
        }
        for (const auto& p : j.at("positions")) {
            const auto orientation = orientation_from_string(p.at("orientation").get<std::string>());
            if (!orientation) throw Error(ErrorCode::Schema, "unknown orientation", p.at("orientation").dump());
            a.positions.push_back({*orientation, p.at("distance").get<double>(), p.at("object").get<std::string>()});
        }
        for (const auto& b : j.at("betweens")) {
            a.betweens.push_back({b.at("left").get<std::string>(), b.at("right").get<std::string>()});
        }
        return a;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Schema, std::string("malformed frame annotation: ") + e.what());
    }
}

}  // namespace hisqa
