#include <doctest.h>

#include <nlohmann/json.hpp>

#include "hisqa/error.hpp"
#include "hisqa/motion.hpp"
#include "synth.hpp"

using namespace hisqa;
using namespace hisqa::testing;

TEST_CASE("joint table order and names") {
    CHECK(kJointCount == 22);
    CHECK(joint_name(JointId::Pelvis) == "pelvis");
    CHECK(joint_name(JointId::LowerSpine) == "lower spine");
    CHECK(joint_name(JointId::RightWrist) == "right wrist");
    CHECK(joint_index(JointId::Head) == 15);
    CHECK(joint_index(JointId::LeftShoulder) == 16);
    for (std::size_t j = 0; j < kJointCount; ++j) {
        const auto back = joint_from_name(joint_name(joint_at(j)));
        REQUIRE(back.has_value());
        CHECK(joint_index(*back) == j);
    }
    CHECK_FALSE(joint_from_name("tail").has_value());
}

TEST_CASE("facing direction matches the rotated template heading") {
    Rng rng(21);
    for (int i = 0; i < 500; ++i) {
        const double heading = uniform(rng, -kPi, kPi);
        const PoseFrame f = standing_pose(uniform(rng, -3, 3), uniform(rng, -3, 3), heading);
        const Vec2 d = facing_direction(f);
        CHECK(d.x == doctest::Approx(std::cos(heading)).epsilon(1e-12));
        CHECK(d.y == doctest::Approx(std::sin(heading)).epsilon(1e-12));
        CHECK(d.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("facing direction falls back to shoulders then fails") {
    PoseFrame f = standing_pose(0, 0, 0.0);
    f[JointId::LeftHip] = f[JointId::RightHip] = Vec3{0, 0, 0.9};
    const Vec2 d = facing_direction(f);
    CHECK(d.x == doctest::Approx(1.0));
    CHECK(d.y == doctest::Approx(0.0));

    f[JointId::LeftShoulder] = f[JointId::RightShoulder] = Vec3{0, 0, 1.4};
    try {
        facing_direction(f);
        FAIL("expected DegeneratePose");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegeneratePose);
    }
}

TEST_CASE("hip line drives facing even when shoulders twist") {
    PoseFrame f = standing_pose(1, 1, 0.0);
    f[JointId::LeftShoulder] = Vec3{1.0, 0.82, 1.42};  // swapped shoulders
    f[JointId::RightShoulder] = Vec3{1.0, 1.18, 1.42};
    const Vec2 d = facing_direction(f);
    CHECK(d.x == doctest::Approx(1.0));
}

TEST_CASE("key frame selection") {
    std::vector<PoseFrame> frames;
    for (int t = 0; t < 95; ++t) frames.push_back(standing_pose(0, 0, 0));
    const MotionSequence m = sequence(frames);
    CHECK(select_key_frames(m, 30) == std::vector<std::size_t>{0, 30, 60, 90, 94});
    const std::vector<std::size_t> extra{31, 30, 500};
    CHECK(select_key_frames(m, 30, extra) == std::vector<std::size_t>{0, 30, 31, 60, 90, 94});
    CHECK_THROWS_AS(select_key_frames(m, 0), Error);

    const MotionSequence one = sequence({standing_pose(0, 0, 0)});
    CHECK(select_key_frames(one, 30) == std::vector<std::size_t>{0});
}

TEST_CASE("motion JSON round trip and schema errors") {
    const MotionSequence m = sequence({standing_pose(0, 0, 0), standing_pose(0.1, 0, 0.2)}, "walk");
    const MotionSequence back = motion_from_json(motion_to_json(m));
    CHECK(back.id() == "walk");
    CHECK(back.size() == 2);
    CHECK(back[1].joints == m[1].joints);

    auto doc = motion_to_json(m);
    doc["joints"][1].erase(doc["joints"][1].begin());
    try {
        motion_from_json(doc);
        FAIL("expected Schema");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Schema);
        CHECK(e.detail() == "walk frame 1");
    }
    auto empty = motion_to_json(m);
    empty["joints"] = nlohmann::json::array();
    CHECK_THROWS_AS(motion_from_json(empty), Error);
    auto bad_fps = motion_to_json(m);
    bad_fps["fps"] = 0.0;
    CHECK_THROWS_AS(motion_from_json(bad_fps), Error);
}
