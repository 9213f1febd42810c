#include "hisqa/scene.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "hisqa/error.hpp"

namespace hisqa {

namespace {

Vec3 vec3_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) {
        throw Error(ErrorCode::Schema, "expected a 3-vector", where);
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

Scene::Scene(std::string id, std::vector<SceneObject> objects)
    : id_(std::move(id)), objects_(std::move(objects)) {
    if (objects_.empty()) {
        throw Error(ErrorCode::Schema, "scene has no objects", id_);
    }
    std::set<std::string_view> seen;
    for (const SceneObject& o : objects_) {
        if (o.id.empty()) throw Error(ErrorCode::Schema, "object id is empty", id_);
        if (!seen.insert(o.id).second) throw Error(ErrorCode::Schema, "duplicate object id", o.id);
        try {
            o.box.validate();
        } catch (const Error& e) {
            throw Error(e.code(), e.what(), o.id);
        }
        if (o.colors && o.colors->size() != o.cloud.size()) {
            throw Error(ErrorCode::Schema, "colors must align with points", o.id);
        }
    }
}

std::size_t Scene::index_of(std::string_view object_id) const {
    for (std::size_t i = 0; i < objects_.size(); ++i) {
        if (objects_[i].id == object_id) return i;
    }
    throw Error(ErrorCode::MissingObject, "unknown object id", std::string(object_id));
}

std::pair<Vec3, Vec3> Scene::bounds() const {
    Vec3 lower = objects_.front().box.min_corner();
    Vec3 upper = objects_.front().box.max_corner();
    auto grow = [&](const Vec3& p) {
        lower = {std::min(lower.x, p.x), std::min(lower.y, p.y), std::min(lower.z, p.z)};
        upper = {std::max(upper.x, p.x), std::max(upper.y, p.y), std::max(upper.z, p.z)};
    };
    for (const SceneObject& o : objects_) {
        grow(o.box.min_corner());
        grow(o.box.max_corner());
        for (const Vec3& p : o.cloud.points()) grow(p);
    }
    return {lower, upper};
}

std::string_view to_string(Predicate p) {
    switch (p) {
        case Predicate::Near: return "near";
        case Predicate::Above: return "above";
        case Predicate::Below: return "below";
    }
    return "near";
}

double footprint_overlap_ratio(const ObjectBox& a, const ObjectBox& b) {
    const Vec3 a_lo = a.min_corner(), a_hi = a.max_corner();
    const Vec3 b_lo = b.min_corner(), b_hi = b.max_corner();
    const double wx = std::max(0.0, std::min(a_hi.x, b_hi.x) - std::max(a_lo.x, b_lo.x));
    const double wy = std::max(0.0, std::min(a_hi.y, b_hi.y) - std::max(a_lo.y, b_lo.y));
    return (wx * wy) / std::min(a.footprint_area(), b.footprint_area());
}

std::vector<RelationTriplet> build_scene_graph(const Scene& scene, const SceneGraphConfig& config) {
    std::vector<RelationTriplet> triplets;
    const auto& objects = scene.objects();
    for (std::size_t i = 0; i < objects.size(); ++i) {
        for (std::size_t j = i + 1; j < objects.size(); ++j) {
            const SceneObject* a = &objects[i];
            const SceneObject* b = &objects[j];
            if (b->id < a->id) std::swap(a, b);

            const double gap = b->box.center.z - a->box.center.z;
            const double min_gap = 0.5 * (0.5 * (a->box.size.z + b->box.size.z));
            const bool stacked = footprint_overlap_ratio(a->box, b->box) > config.overlap_ratio &&
                                 std::abs(gap) > min_gap;
            if (stacked) {
                const SceneObject* upper = gap > 0.0 ? b : a;
                const SceneObject* lower = gap > 0.0 ? a : b;
                triplets.push_back({upper->id, Predicate::Above, lower->id});
                triplets.push_back({lower->id, Predicate::Below, upper->id});
            } else if (horizontal_distance(a->box.center, b->box.center) < config.near_distance) {
                triplets.push_back({a->id, Predicate::Near, b->id});
            }
        }
    }
    std::sort(triplets.begin(), triplets.end(), [](const RelationTriplet& l, const RelationTriplet& r) {
        return std::tie(l.subject_id, l.object_id, l.predicate) < std::tie(r.subject_id, r.object_id, r.predicate);
    });
    return triplets;
}

std::string refer_expression(const RelationTriplet& triplet, const Scene& scene) {
    const SceneObject& subject = scene.object(triplet.subject_id);
    const SceneObject& object = scene.object(triplet.object_id);
    return "The " + subject.label + " is " + std::string(to_string(triplet.predicate)) + " the " + object.label + ".";
}

Scene scene_from_json(const nlohmann::json& doc) {
    std::string current = "<scene>";
    try {
        const std::string id = doc.at("id").get<std::string>();
        std::vector<SceneObject> objects;
        for (const auto& o : doc.at("objects")) {
            current = o.contains("id") && o["id"].is_string() ? o["id"].get<std::string>() : "<object without id>";
            const auto& box = o.at("box");
            std::vector<Vec3> points;
            for (const auto& p : o.at("points")) points.push_back(vec3_from_json(p, current));
            if (points.empty()) throw Error(ErrorCode::Schema, "object has no points", current);
            std::optional<std::vector<Rgb>> colors;
            if (o.contains("colors") && !o["colors"].is_null()) {
                colors.emplace();
                for (const auto& c : o["colors"]) {
                    if (!c.is_array() || c.size() != 3) throw Error(ErrorCode::Schema, "color must be [r,g,b]", current);
                    Rgb rgb{};
                    for (std::size_t k = 0; k < 3; ++k) {
                        if (!c[k].is_number_integer() || c[k].get<long long>() < 0 || c[k].get<long long>() > 255) {
                            throw Error(ErrorCode::Schema, "color channels must be integers in [0, 255]", current);
                        }
                        rgb[k] = static_cast<std::uint8_t>(c[k].get<long long>());
                    }
                    colors->push_back(rgb);
                }
            }
            objects.push_back(SceneObject{
                o.at("id").get<std::string>(),
                o.at("label").get<std::string>(),
                ObjectBox{vec3_from_json(box.at("center"), current), vec3_from_json(box.at("size"), current)},
                PointCloud(std::move(points)),
                std::move(colors),
            });
        }
        return Scene(id, std::move(objects));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Schema, std::string("malformed scene document: ") + e.what(), current);
    } catch (const Error& e) {
        if (!e.detail().empty()) throw;
        throw Error(e.code(), e.what(), current);
    }
}

nlohmann::json scene_to_json(const Scene& scene) {
    nlohmann::json objects = nlohmann::json::array();
    for (const SceneObject& o : scene.objects()) {
        nlohmann::json points = nlohmann::json::array();
        for (const Vec3& p : o.cloud.points()) points.push_back({p.x, p.y, p.z});
        nlohmann::json entry = {
            {"id", o.id},
            {"label", o.label},
            {"box",
             {{"center", {o.box.center.x, o.box.center.y, o.box.center.z}},
              {"size", {o.box.size.x, o.box.size.y, o.box.size.z}}}},
            {"points", std::move(points)},
        };
        if (o.colors) entry["colors"] = *o.colors;
        objects.push_back(std::move(entry));
    }
    return {{"id", scene.id()}, {"objects", std::move(objects)}};
}

Scene load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open scene file", path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Schema, std::string("invalid JSON: ") + e.what(), path.string());
    }
    return scene_from_json(doc);
}

}  // namespace hisqa
