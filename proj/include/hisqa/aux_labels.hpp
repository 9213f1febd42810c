#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hisqa/interaction.hpp"

namespace hisqa {

class ActivityVocab {
public:
    explicit ActivityVocab(std::vector<std::string> names);

    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t index) const { return names_.at(index); }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
};

// Exact-match index. Unknown names raise UnknownActivity; the message lists
// the closest vocabulary entries by edit distance.
std::size_t activity_label(std::string_view name, const ActivityVocab& vocab);

std::size_t edit_distance(std::string_view a, std::string_view b);

// {Front, Left, Right, Back} x {Near, Far}.
enum class SpatialRelation8 : std::uint8_t {
    FrontNear,
    FrontFar,
    LeftNear,
    LeftFar,
    RightNear,
    RightFar,
    BackNear,
    BackFar,
};

inline constexpr std::size_t kSpatialClasses = 8;
inline constexpr std::string_view kSpatialTaxonomyVersion = "dir4xprox2/1";

std::string_view to_string(SpatialRelation8 r);

// Directional sector (no `at` disk) crossed with Near iff horizontal distance
// <= proximity. An object centered exactly on the pelvis counts as FrontNear.
SpatialRelation8 spatial_relation_label(const PoseFrame& frame, const SceneObject& object, double proximity = 2.0);

// Dense N x T x J bit tensor, row-major (object, frame, joint).
class ContactTensor {
public:
    ContactTensor(std::size_t objects, std::size_t frames, std::size_t joints = kJointCount);

    std::size_t objects() const { return objects_; }
    std::size_t frames() const { return frames_; }
    std::size_t joints() const { return joints_; }

    bool get(std::size_t i, std::size_t t, std::size_t l) const { return bits_[offset(i, t, l)] != 0; }
    void set(std::size_t i, std::size_t t, std::size_t l, bool value = true) { bits_[offset(i, t, l)] = value ? 1 : 0; }
    std::size_t count() const;

    // MSB-first packing in row-major order; trailing pad bits are zero.
    std::vector<std::uint8_t> pack() const;
    static ContactTensor unpack(std::span<const std::uint8_t> bytes, std::size_t objects, std::size_t frames,
                                std::size_t joints = kJointCount);

    friend bool operator==(const ContactTensor&, const ContactTensor&) = default;

private:
    std::size_t offset(std::size_t i, std::size_t t, std::size_t l) const;

    std::size_t objects_, frames_, joints_;
    std::vector<std::uint8_t> bits_;
};

// Bit (i, t, l) is set iff joint l touches object i at frame t. Frames not
// covered by `annotations` are computed with detect_contacts.
ContactTensor contact_label_matrix(std::span<const FrameAnnotation> annotations, const Scene& scene,
                                   const MotionSequence& motion, double epsilon = 0.1);

// Up to k object indices by horizontal pelvis-to-center distance, ties by id.
std::vector<std::size_t> knearest_object_indices(const PoseFrame& frame, const Scene& scene, std::size_t k);

struct AuxLabels {
    std::size_t activity = 0;
    std::size_t objects = 0;
    std::size_t frames = 0;
    std::vector<SpatialRelation8> spatial;  // N x T, row-major
    ContactTensor contact{0, 0};
    std::size_t k = 0;                       // effective k = min(k, N)
    std::vector<std::size_t> knn;            // T x k, row-major

    SpatialRelation8 spatial_at(std::size_t i, std::size_t t) const { return spatial.at(i * frames + t); }
};

struct AuxLabelConfig {
    double contact_epsilon = 0.1;
    double proximity = 2.0;
    std::size_t k = 3;
};

AuxLabels build_aux_labels(const Scene& scene, const MotionSequence& motion, std::size_t activity,
                           std::span<const FrameAnnotation> annotations, const AuxLabelConfig& config = {});

inline constexpr std::string_view kAuxLabelsSchema = "hisqa.aux_labels/1";

nlohmann::json aux_labels_to_json(const AuxLabels& labels);
AuxLabels aux_labels_from_json(const nlohmann::json& j);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace hisqa
