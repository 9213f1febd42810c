#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hisqa/geometry.hpp"

namespace hisqa {

using Rgb = std::array<std::uint8_t, 3>;

struct SceneObject {
    std::string id;
    std::string label;
    ObjectBox box;
    PointCloud cloud;
    std::optional<std::vector<Rgb>> colors;  // aligned with cloud when present
};

class Scene {
public:
    // Rejects empty scenes, empty ids, duplicate ids, bad boxes and
    // misaligned color arrays; the offending object id is the error detail.
    Scene(std::string id, std::vector<SceneObject> objects);

    const std::string& id() const { return id_; }
    std::size_t size() const { return objects_.size(); }
    const std::vector<SceneObject>& objects() const { return objects_; }
    const SceneObject& operator[](std::size_t i) const { return objects_.at(i); }

    // Index of the object with this id; MissingObject if absent.
    std::size_t index_of(std::string_view object_id) const;
    const SceneObject& object(std::string_view object_id) const { return objects_[index_of(object_id)]; }

    // Axis-aligned bounds of all boxes and points.
    std::pair<Vec3, Vec3> bounds() const;

private:
    std::string id_;
    std::vector<SceneObject> objects_;
};

enum class Predicate { Near, Above, Below };

std::string_view to_string(Predicate p);

struct RelationTriplet {
    std::string subject_id;
    Predicate predicate;
    std::string object_id;

    friend bool operator==(const RelationTriplet&, const RelationTriplet&) = default;
};

struct SceneGraphConfig {
    double near_distance = 1.5;  // horizontal center distance, meters
    double overlap_ratio = 0.3;  // footprint intersection / smaller footprint
};

// Footprint intersection area divided by the smaller footprint area.
double footprint_overlap_ratio(const ObjectBox& a, const ObjectBox& b);

// Relation triplets sorted by (subject, object, predicate). `near` appears once
// per unordered pair with the smaller id as subject; above/below come paired.
std::vector<RelationTriplet> build_scene_graph(const Scene& scene, const SceneGraphConfig& config = {});

// "The {subject label} is {predicate} the {object label}."
std::string refer_expression(const RelationTriplet& triplet, const Scene& scene);

Scene scene_from_json(const nlohmann::json& doc);
nlohmann::json scene_to_json(const Scene& scene);
Scene load_scene(const std::filesystem::path& path);

}  // namespace hisqa
