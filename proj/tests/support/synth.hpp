#pragma once
// Synthetic scenes and poses shared by the unit and acceptance tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hisqa/motion.hpp"
#include "hisqa/scene.hpp"

namespace hisqa::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Vec3 rotate_z(const Vec3& p, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * p.x - s * p.y, s * p.x + c * p.y, p.z};
}

// Points drawn uniformly inside the box.
inline SceneObject random_object(Rng& rng, std::string id, std::string label, Vec3 center, Vec3 size,
                                 std::size_t points) {
    std::vector<Vec3> pts;
    pts.reserve(points);
    for (std::size_t i = 0; i < points; ++i) {
        pts.push_back({uniform(rng, center.x - size.x / 2, center.x + size.x / 2),
                       uniform(rng, center.y - size.y / 2, center.y + size.y / 2),
                       uniform(rng, center.z - size.z / 2, center.z + size.z / 2)});
    }
    return SceneObject{std::move(id), std::move(label), ObjectBox{center, size}, PointCloud(std::move(pts)), {}};
}

// One-point object, handy for exact distances.
inline SceneObject point_object(std::string id, const Vec3& p, std::string label = "thing") {
    return SceneObject{std::move(id), std::move(label), ObjectBox{p, {0.1, 0.1, 0.1}}, PointCloud({p}), {}};
}

inline Scene random_scene(Rng& rng, std::size_t objects, std::size_t points, double extent = 3.0) {
    std::vector<SceneObject> list;
    for (std::size_t i = 0; i < objects; ++i) {
        const Vec3 center{uniform(rng, -extent, extent), uniform(rng, -extent, extent), uniform(rng, 0.3, 1.2)};
        const Vec3 size{uniform(rng, 0.3, 1.5), uniform(rng, 0.3, 1.5), uniform(rng, 0.3, 1.2)};
        list.push_back(random_object(rng, "obj_" + std::to_string(i), "object", center, size, points));
    }
    return Scene("synthetic", std::move(list));
}

// Upright template pose: x forward, y to the person's left, z up.
inline const std::array<Vec3, kJointCount>& template_skeleton() {
    static const std::array<Vec3, kJointCount> joints = {{
        {0.0, 0.0, 0.95},    {0.0, 0.1, 0.9},     {0.0, -0.1, 0.9},    {0.0, 0.0, 1.05},   {0.02, 0.1, 0.5},
        {0.02, -0.1, 0.5},   {0.0, 0.0, 1.2},     {0.0, 0.1, 0.1},     {0.0, -0.1, 0.1},   {0.0, 0.0, 1.35},
        {0.1, 0.1, 0.02},    {0.1, -0.1, 0.02},   {0.0, 0.0, 1.5},     {0.0, 0.08, 1.45},  {0.0, -0.08, 1.45},
        {0.02, 0.0, 1.65},   {0.0, 0.18, 1.42},   {0.0, -0.18, 1.42},  {0.0, 0.2, 1.15},   {0.0, -0.2, 1.15},
        {0.05, 0.2, 0.9},    {0.05, -0.2, 0.9},
    }};
    return joints;
}

// Template pose standing at (x, y) with counter-clockwise heading from +x.
inline PoseFrame standing_pose(double x, double y, double heading, std::size_t index = 0) {
    PoseFrame f;
    f.frame_index = index;
    for (std::size_t j = 0; j < kJointCount; ++j) {
        f.joints[j] = rotate_z(template_skeleton()[j], heading) + Vec3{x, y, 0.0};
    }
    return f;
}

// Template pose with every joint jittered; hips stay well apart.
inline PoseFrame random_pose(Rng& rng, double extent = 3.0, double jitter = 0.3, std::size_t index = 0) {
    PoseFrame f = standing_pose(uniform(rng, -extent, extent), uniform(rng, -extent, extent),
                                uniform(rng, -3.14159, 3.14159), index);
    for (auto& j : f.joints) {
        j = j + Vec3{uniform(rng, -jitter, jitter), uniform(rng, -jitter, jitter), uniform(rng, -jitter, jitter)};
    }
    return f;
}

inline PoseFrame rotated(const PoseFrame& f, double angle) {
    PoseFrame r = f;
    for (auto& j : r.joints) j = rotate_z(j, angle);
    return r;
}

inline Scene rotated(const Scene& scene, double angle) {
    std::vector<SceneObject> objects;
    for (const auto& o : scene.objects()) {
        std::vector<Vec3> pts;
        for (const auto& p : o.cloud.points()) pts.push_back(rotate_z(p, angle));
        // the box is only used through its center here
        objects.push_back({o.id, o.label, ObjectBox{rotate_z(o.box.center, angle), o.box.size},
                           PointCloud(std::move(pts)), o.colors});
    }
    return Scene(scene.id(), std::move(objects));
}

inline MotionSequence sequence(std::vector<PoseFrame> frames, std::string id = "synthetic_motion") {
    for (std::size_t t = 0; t < frames.size(); ++t) frames[t].frame_index = t;
    return MotionSequence(std::move(id), 30.0, std::move(frames));
}

}  // namespace hisqa::testing
