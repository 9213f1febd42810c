#include <doctest.h>

#include <algorithm>
#include <limits>
#include <tuple>

#include <nlohmann/json.hpp>

#include "hisqa/error.hpp"
#include "hisqa/interaction.hpp"
#include "synth.hpp"

using namespace hisqa;
using namespace hisqa::testing;

namespace {

std::vector<ContactTuple> brute_contacts(const PoseFrame& frame, const Scene& scene, double eps) {
    std::vector<ContactTuple> out;
    for (std::size_t j = 0; j < kJointCount; ++j) {
        for (const auto& o : scene.objects()) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& p : o.cloud.points()) {
                const double dx = frame.joints[j].x - p.x, dy = frame.joints[j].y - p.y, dz = frame.joints[j].z - p.z;
                best = std::min(best, dx * dx + dy * dy + dz * dz);
            }
            const double d = std::sqrt(best);
            if (d < eps) out.push_back({joint_at(j), o.id, d});
        }
    }
    std::sort(out.begin(), out.end(), [](const ContactTuple& a, const ContactTuple& b) {
        return std::tie(a.joint, a.object_id) < std::tie(b.joint, b.object_id);
    });
    return out;
}

double wrap(double a) {
    while (a <= -kPi) a += 2 * kPi;
    while (a > kPi) a -= 2 * kPi;
    return a;
}

// Independent sector rule on an angle computed from the known template heading.
OrientationCategory oracle_sector(double a) {
    if (std::abs(a) <= kPi / 4) return OrientationCategory::FacingTowards;
    if (std::abs(a) > 3 * kPi / 4) return OrientationCategory::FacingAway;
    return a > 0 ? OrientationCategory::OnLeft : OrientationCategory::OnRight;
}

PoseFrame far_pose_with_wrist_at(const Vec3& wrist) {
    PoseFrame f = standing_pose(0, 0, 0);
    f[JointId::RightWrist] = wrist;
    return f;
}

}  // namespace

TEST_CASE("contacts equal the exhaustive oracle on random frames") {
    Rng rng(41);
    for (int rep = 0; rep < 30; ++rep) {
        const Scene scene = random_scene(rng, 4, 300, 0.8);
        const PoseFrame f = random_pose(rng, 0.5);
        for (double eps : {0.05, 0.1, 0.3}) {
            REQUIRE(detect_contacts(f, scene, eps) == brute_contacts(f, scene, eps));
        }
    }
}

TEST_CASE("contact threshold is strict") {
    const PoseFrame f = far_pose_with_wrist_at({0, 0, 5});
    const Scene at("s", {point_object("cup", {0.1, 0, 5})});
    CHECK(detect_contacts(f, at, 0.1).empty());
    const Scene inside("s", {point_object("cup", {0.1 - 1e-9, 0, 5})});
    const auto c = detect_contacts(f, inside, 0.1);
    REQUIRE(c.size() == 1);
    CHECK(c[0].joint == JointId::RightWrist);
    CHECK(c[0].object_id == "cup");
    CHECK_THROWS_AS(detect_contacts(f, at, 0.0), Error);
}

TEST_CASE("contact ordering is joint index then object id") {
    PoseFrame f = standing_pose(0, 0, 0);
    const Scene scene("s", {point_object("zeta", f[JointId::LeftWrist]), point_object("alpha", f[JointId::LeftWrist]),
                            point_object("mid", f[JointId::Pelvis])});
    const auto c = detect_contacts(f, scene, 0.01);
    REQUIRE(c.size() == 3);
    CHECK(c[0].object_id == "mid");
    CHECK(c[1].object_id == "alpha");
    CHECK(c[2].object_id == "zeta");
}

TEST_CASE("direction sector boundaries: frozen values") {
    CHECK(direction_sector(0.0) == OrientationCategory::FacingTowards);
    CHECK(direction_sector(kPi / 4) == OrientationCategory::FacingTowards);
    CHECK(direction_sector(std::nextafter(kPi / 4, 4.0)) == OrientationCategory::OnLeft);
    CHECK(direction_sector(3 * kPi / 4) == OrientationCategory::OnLeft);
    CHECK(direction_sector(std::nextafter(3 * kPi / 4, 4.0)) == OrientationCategory::FacingAway);
    CHECK(direction_sector(kPi) == OrientationCategory::FacingAway);
    CHECK(direction_sector(-kPi / 4) == OrientationCategory::OnRight);
    CHECK(direction_sector(std::nextafter(-kPi / 4, 0.0)) == OrientationCategory::FacingTowards);
    CHECK(direction_sector(-3 * kPi / 4) == OrientationCategory::FacingAway);
    CHECK(direction_sector(std::nextafter(-3 * kPi / 4, 0.0)) == OrientationCategory::OnRight);
}

TEST_CASE("direction sectors partition the circle") {
    Rng rng(42);
    std::array<int, 4> hits{};
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto c = direction_sector(uniform(rng, -kPi, kPi));
        REQUIRE(c != OrientationCategory::At);
        ++hits[static_cast<std::size_t>(c)];
    }
    for (int h : hits) CHECK(std::abs(h / double(n) - 0.25) < 0.02);
}

TEST_CASE("classified positions agree with the heading oracle") {
    Rng rng(43);
    int checked = 0;
    for (int i = 0; i < 3000; ++i) {
        const double heading = uniform(rng, -kPi, kPi);
        const PoseFrame f = standing_pose(uniform(rng, -2, 2), uniform(rng, -2, 2), heading);
        const double bearing = uniform(rng, -kPi, kPi);
        const double d = uniform(rng, 0.0, 4.0);
        const Vec3 c{f[JointId::Pelvis].x + d * std::cos(bearing), f[JointId::Pelvis].y + d * std::sin(bearing), 0.5};
        const auto p = classify_position(f, point_object("o", c));
        CHECK(p.distance == doctest::Approx(d).epsilon(1e-9));
        if (d < 0.8 - 1e-9) {
            CHECK(p.orientation == OrientationCategory::At);
            continue;
        }
        if (d < 0.8 + 1e-9) continue;
        const double rel = wrap(bearing - heading);
        bool boundary = false;
        for (double b : {kPi / 4, 3 * kPi / 4, -kPi / 4, -3 * kPi / 4, kPi, -kPi}) boundary |= std::abs(rel - b) < 1e-6;
        if (boundary) continue;
        CHECK(p.orientation == oracle_sector(rel));
        ++checked;
    }
    CHECK(checked > 2000);
}

TEST_CASE("between matches pair enumeration") {
    Rng rng(44);
    const InteractionConfig cfg;
    for (int rep = 0; rep < 200; ++rep) {
        const double heading = uniform(rng, -kPi, kPi);
        const PoseFrame f = standing_pose(0, 0, heading);
        std::vector<SceneObject> objects;
        std::vector<double> rel, dist;
        for (int i = 0; i < 6; ++i) {
            const double r = uniform(rng, -kPi, kPi);
            const double d = uniform(rng, 0.5, 2.5);
            objects.push_back(point_object("o" + std::to_string(i), {d * std::cos(heading + r), d * std::sin(heading + r), 0.5}));
            rel.push_back(r);
            dist.push_back(d);
        }
        const Scene scene("s", objects);
        struct E {
            double combined;
            std::string l, r;
        };
        std::vector<E> expected;
        bool ambiguous = false;
        for (int a = 0; a < 6; ++a) {
            for (int b = 0; b < 6; ++b) {
                const bool left = dist[a] >= 0.8 && dist[a] < 2.0 && oracle_sector(rel[a]) == OrientationCategory::OnLeft;
                const bool right = dist[b] >= 0.8 && dist[b] < 2.0 && oracle_sector(rel[b]) == OrientationCategory::OnRight;
                if (std::abs(std::abs(rel[a] + rel[b]) - kPi / 6) < 1e-6) ambiguous = true;
                if (left && right && std::abs(rel[a] + rel[b]) < kPi / 6) {
                    expected.push_back({dist[a] + dist[b], objects[a].id, objects[b].id});
                }
            }
        }
        if (ambiguous) continue;
        std::sort(expected.begin(), expected.end(),
                  [](const E& x, const E& y) { return std::tie(x.combined, x.l, x.r) < std::tie(y.combined, y.l, y.r); });
        const auto got = detect_between(f, scene, cfg);
        REQUIRE(got.size() == expected.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].left_object_id == expected[i].l);
            CHECK(got[i].right_object_id == expected[i].r);
        }
    }
}

TEST_CASE("between: mirrored pair is found, same-side pair is not") {
    const PoseFrame f = standing_pose(0, 0, 0);
    const Scene scene("s", {point_object("left", {0, 1.5, 0.5}), point_object("right", {0.1, -1.5, 0.5}),
                            point_object("left2", {0.2, 1.2, 0.5})});
    const auto b = detect_between(f, scene);
    REQUIRE(b.size() == 2);
    CHECK(b[0] == BetweenPair{"left2", "right"});
    CHECK(b[1] == BetweenPair{"left", "right"});
}

TEST_CASE("contact change frames equal the brute-force oracle") {
    Rng rng(45);
    const Scene scene = random_scene(rng, 3, 200, 0.6);
    std::vector<PoseFrame> frames;
    for (int t = 0; t < 40; ++t) frames.push_back(random_pose(rng, 0.6, 0.4));
    const MotionSequence m = sequence(frames);
    std::vector<std::size_t> expected;
    auto key = [&](std::size_t t) {
        std::vector<std::pair<JointId, std::string>> k;
        for (const auto& c : brute_contacts(m[t], scene, 0.1)) k.emplace_back(c.joint, c.object_id);
        return k;
    };
    for (std::size_t t = 1; t < m.size(); ++t)
        if (key(t) != key(t - 1)) expected.push_back(t);
    CHECK(contact_change_frames(m, scene, 0.1) == expected);
    CHECK_FALSE(expected.empty());
}

TEST_CASE("annotate_frame keeps scene order and adds frame context to errors") {
    PoseFrame f = standing_pose(0, 0, 0, 7);
    const Scene scene("s", {point_object("z", {2, 0, 0.5}), point_object("a", {0, 2, 0.5})});
    const auto a = annotate_frame(f, scene);
    CHECK(a.frame_index == 7);
    REQUIRE(a.positions.size() == 2);
    CHECK(a.positions[0].object_id == "z");
    CHECK(a.positions[0].orientation == OrientationCategory::FacingTowards);
    CHECK(a.positions[1].orientation == OrientationCategory::OnLeft);

    const auto back = frame_annotation_from_json(frame_annotation_to_json(a));
    CHECK(back.positions == a.positions);

    f[JointId::LeftHip] = f[JointId::RightHip];
    f[JointId::LeftShoulder] = f[JointId::RightShoulder];
    try {
        annotate_frame(f, scene);
        FAIL("expected DegeneratePose");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegeneratePose);
        CHECK(std::string(e.what()).find("frame 7") != std::string::npos);
    }
}
