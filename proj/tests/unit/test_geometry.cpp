#include <doctest.h>

#include <algorithm>
#include <limits>

#include "hisqa/error.hpp"
#include "hisqa/geometry.hpp"
#include "synth.hpp"

using namespace hisqa;
using hisqa::testing::Rng;
using hisqa::testing::uniform;

namespace {

double brute_nearest_squared(const std::vector<Vec3>& pts, const Vec3& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : pts) {
        const double dx = p.x - q.x, dy = p.y - q.y, dz = p.z - q.z;
        best = std::min(best, dx * dx + dy * dy + dz * dz);
    }
    return best;
}

void check_against_brute(const std::vector<Vec3>& pts, Rng& rng, int queries) {
    const PointCloud cloud(pts);
    for (int i = 0; i < queries; ++i) {
        const Vec3 p{uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3, 3)};
        REQUIRE(cloud.nearest_squared(p) == brute_nearest_squared(pts, p));
    }
    // queries exactly on stored points
    for (std::size_t i = 0; i < pts.size(); i += 1 + pts.size() / 16) {
        REQUIRE(cloud.nearest_squared(pts[i]) == 0.0);
    }
}

}  // namespace

TEST_CASE("k-d tree nearest distance equals exhaustive scan") {
    Rng rng(11);
    for (std::size_t n : {1u, 2u, 7u, 8u, 9u, 63u, 500u, 2048u}) {
        std::vector<Vec3> pts;
        for (std::size_t i = 0; i < n; ++i) pts.push_back({uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2)});
        check_against_brute(pts, rng, 300);
    }
}

TEST_CASE("k-d tree handles duplicates and flat clouds") {
    Rng rng(12);
    std::vector<Vec3> dup(100, Vec3{0.5, 0.5, 0.5});
    check_against_brute(dup, rng, 100);

    std::vector<Vec3> plane;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) plane.push_back({i * 0.1, j * 0.1, 0.75});
    check_against_brute(plane, rng, 300);

    std::vector<Vec3> line;
    for (int i = 0; i < 50; ++i) line.push_back({0.0, 0.0, i * 0.05});
    check_against_brute(line, rng, 300);
}

TEST_CASE("point cloud rejects empty and non-finite input") {
    CHECK_THROWS_AS(PointCloud({}), Error);
    CHECK_THROWS_AS(PointCloud({{0, 0, std::numeric_limits<double>::quiet_NaN()}}), Error);
    CHECK_THROWS_AS(PointCloud({{std::numeric_limits<double>::infinity(), 0, 0}}), Error);
}

TEST_CASE("horizontal distance ignores z") {
    CHECK(horizontal_distance({0, 0, 0}, {3, 4, 100}) == 5.0);
    CHECK(horizontal_distance({1, 1, 1}, {1, 1, -1}) == 0.0);
}

TEST_CASE("signed heading angle: frozen values") {
    const Vec2 fx{1, 0};
    CHECK(signed_heading_angle(fx, {1, 0}) == 0.0);
    CHECK(signed_heading_angle(fx, {0, 1}) == doctest::Approx(kPi / 2));
    CHECK(signed_heading_angle(fx, {0, -1}) == doctest::Approx(-kPi / 2));
    CHECK(signed_heading_angle(fx, {1, 1}) == doctest::Approx(kPi / 4));
    // antipodal tie resolves to +pi, including the -0.0 side
    CHECK(signed_heading_angle(fx, {-1, 0}) == kPi);
    CHECK(signed_heading_angle(fx, {-1, -0.0}) == kPi);
    CHECK(signed_heading_angle({0, 1}, {1, 0}) == doctest::Approx(-kPi / 2));
}

TEST_CASE("signed heading angle range and rotation invariance") {
    Rng rng(13);
    for (int i = 0; i < 2000; ++i) {
        const double f = uniform(rng, -kPi, kPi);
        const Vec2 facing{std::cos(f), std::sin(f)};
        const Vec2 target{uniform(rng, -5, 5), uniform(rng, -5, 5)};
        const double a = signed_heading_angle(facing, target);
        REQUIRE(a > -kPi);
        REQUIRE(a <= kPi);
        const double r = uniform(rng, -kPi, kPi);
        const Vec2 rf{std::cos(f + r), std::sin(f + r)};
        const Vec2 rt{std::cos(r) * target.x - std::sin(r) * target.y, std::sin(r) * target.x + std::cos(r) * target.y};
        const double b = signed_heading_angle(rf, rt);
        if (std::abs(std::abs(a) - kPi) > 1e-6) REQUIRE(b == doctest::Approx(a).epsilon(1e-9));
    }
}

TEST_CASE("signed heading angle preconditions") {
    CHECK_THROWS_AS(signed_heading_angle({2, 0}, {1, 0}), Error);
    try {
        signed_heading_angle({1, 0}, {0, 0});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateDirection);
    }
}

TEST_CASE("object box validation") {
    CHECK_NOTHROW(ObjectBox({{0, 0, 0}, {1, 1, 1}}).validate());
    CHECK_THROWS_AS(ObjectBox({{0, 0, 0}, {0, 1, 1}}).validate(), Error);
    CHECK_THROWS_AS(ObjectBox({{0, 0, 0}, {1, -1, 1}}).validate(), Error);
    CHECK(ObjectBox({{0, 0, 0}, {2, 3, 1}}).footprint_area() == 6.0);
}
