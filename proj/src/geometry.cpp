#include "hisqa/geometry.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "hisqa/error.hpp"

namespace hisqa {

namespace {

constexpr std::size_t kLeafSize = 8;

double squared_distance(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

}  // namespace

void ObjectBox::validate() const {
    if (!center.finite() || !size.finite()) {
        throw Error(ErrorCode::Schema, "bounding box has non-finite values");
    }
    if (size.x <= 0.0 || size.y <= 0.0 || size.z <= 0.0) {
        throw Error(ErrorCode::Schema, "bounding box extents must be positive");
    }
}

struct PointCloud::Query {
    Vec3 p;
    double best = std::numeric_limits<double>::infinity();
};

PointCloud::PointCloud(std::vector<Vec3> points) : points_(std::move(points)) {
    if (points_.empty()) {
        throw Error(ErrorCode::Precondition, "point cloud must be non-empty");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!points_[i].finite()) {
            throw Error(ErrorCode::Schema, "point cloud has a non-finite point", std::to_string(i));
        }
    }
    tree_ = points_;
    axis_.assign(tree_.size(), 0);
    build(0, tree_.size());
}

void PointCloud::build(std::size_t lo, std::size_t hi) {
    if (hi - lo <= kLeafSize) return;

    Vec3 lower = tree_[lo];
    Vec3 upper = tree_[lo];
    for (std::size_t i = lo + 1; i < hi; ++i) {
        const Vec3& q = tree_[i];
        lower = {std::min(lower.x, q.x), std::min(lower.y, q.y), std::min(lower.z, q.z)};
        upper = {std::max(upper.x, q.x), std::max(upper.y, q.y), std::max(upper.z, q.z)};
    }
    const Vec3 spread = upper - lower;
    unsigned char axis = 0;
    if (spread.y > spread[axis]) axis = 1;
    if (spread.z > spread[axis]) axis = 2;

    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(tree_.begin() + static_cast<std::ptrdiff_t>(lo),
                     tree_.begin() + static_cast<std::ptrdiff_t>(mid),
                     tree_.begin() + static_cast<std::ptrdiff_t>(hi),
                     [axis](const Vec3& a, const Vec3& b) { return a[axis] < b[axis]; });
    axis_[mid] = axis;
    build(lo, mid);
    build(mid + 1, hi);
}

void PointCloud::search(Query& q, std::size_t lo, std::size_t hi) const {
    if (hi - lo <= kLeafSize) {
        for (std::size_t i = lo; i < hi; ++i) {
            q.best = std::min(q.best, squared_distance(q.p, tree_[i]));
        }
        return;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    const unsigned char axis = axis_[mid];
    const double diff = q.p[axis] - tree_[mid][axis];
    q.best = std::min(q.best, squared_distance(q.p, tree_[mid]));

    // Points on the far side are at least |diff| away along `axis`; rounding
    // is monotone, so the bound holds for the computed distances too.
    if (diff < 0.0) {
        search(q, lo, mid);
        if (diff * diff < q.best) search(q, mid + 1, hi);
    } else {
        search(q, mid + 1, hi);
        if (diff * diff < q.best) search(q, lo, mid);
    }
}

double PointCloud::nearest_squared(const Vec3& p) const {
    Query q{p};
    search(q, 0, tree_.size());
    return q.best;
}

double nearest_distance(const Vec3& p, const PointCloud& cloud) {
    if (!p.finite()) {
        throw Error(ErrorCode::Precondition, "query point must be finite");
    }
    return std::sqrt(cloud.nearest_squared(p));
}

double horizontal_distance(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

double signed_heading_angle(const Vec2& facing, const Vec2& target_dir) {
    if (std::abs(facing.norm() - 1.0) > 1e-9) {
        throw Error(ErrorCode::Precondition, "facing direction must have unit norm");
    }
    if (!(target_dir.norm() > 0.0)) {
        throw Error(ErrorCode::DegenerateDirection, "target direction has zero length");
    }
    const double cross = facing.x * target_dir.y - facing.y * target_dir.x;
    const double dot = facing.x * target_dir.x + facing.y * target_dir.y;
    const double angle = std::atan2(cross, dot);
    return angle <= -kPi ? kPi : angle;
}

}  // namespace hisqa
