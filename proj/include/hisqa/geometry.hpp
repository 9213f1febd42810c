#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hisqa {

// Scene coordinates in meters, z up.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;

    double operator[](std::size_t axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    double norm() const { return std::sqrt(x * x + y * y); }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 horizontal(const Vec3& v) { return {v.x, v.y}; }

// Axis-aligned box; `size` holds full extents.
struct ObjectBox {
    Vec3 center;
    Vec3 size;

    // Throws Schema if any extent is not strictly positive or a value is non-finite.
    void validate() const;
    double footprint_area() const { return size.x * size.y; }
    Vec3 min_corner() const { return center - 0.5 * size; }
    Vec3 max_corner() const { return center + 0.5 * size; }
};

// Immutable, non-empty set of finite points with an exact k-d tree built at
// construction. Queries return the same value an exhaustive scan would.
class PointCloud {
public:
    explicit PointCloud(std::vector<Vec3> points);

    std::span<const Vec3> points() const { return points_; }
    std::size_t size() const { return points_.size(); }

    // Minimum squared Euclidean distance from p to any stored point.
    double nearest_squared(const Vec3& p) const;

private:
    struct Query;
    void build(std::size_t lo, std::size_t hi);
    void search(Query& q, std::size_t lo, std::size_t hi) const;

    std::vector<Vec3> points_;         // caller order
    std::vector<Vec3> tree_;           // k-d ordered copy
    std::vector<unsigned char> axis_;  // split axis, indexed by range midpoint
};

double nearest_distance(const Vec3& p, const PointCloud& cloud);

// Distance on the xy-plane; z is ignored.
double horizontal_distance(const Vec3& a, const Vec3& b);

// Counter-clockwise angle from `facing` to `target_dir` about +z, in (-pi, pi].
// The antipodal tie resolves to +pi. `facing` must be unit length and
// `target_dir` non-zero (DegenerateDirection otherwise).
double signed_heading_angle(const Vec2& facing, const Vec2& target_dir);

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace hisqa
