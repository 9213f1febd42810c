#include "hisqa/aux_labels.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "hisqa/error.hpp"

namespace hisqa {

namespace {

constexpr std::array<std::string_view, kSpatialClasses> kSpatialNames = {
    "front_near", "front_far", "left_near", "left_far", "right_near", "right_far", "back_near", "back_far",
};

constexpr std::string_view kBase64Alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

}  // namespace

ActivityVocab::ActivityVocab(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw Error(ErrorCode::Precondition, "activity vocabulary is empty");
    std::set<std::string_view> seen;
    for (const auto& n : names_) {
        if (!seen.insert(n).second) throw Error(ErrorCode::Precondition, "duplicate activity name", n);
    }
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    std::iota(row.begin(), row.end(), 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diagonal = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t above = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diagonal + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diagonal = above;
        }
    }
    return row[b.size()];
}

std::size_t activity_label(std::string_view name, const ActivityVocab& vocab) {
    const auto& names = vocab.names();
    const auto it = std::find(names.begin(), names.end(), name);
    if (it != names.end()) return static_cast<std::size_t>(it - names.begin());

    std::vector<std::pair<std::size_t, std::string_view>> ranked;
    for (const auto& n : names) ranked.emplace_back(edit_distance(name, n), n);
    std::sort(ranked.begin(), ranked.end());
    std::string hint;
    for (std::size_t i = 0; i < std::min<std::size_t>(3, ranked.size()); ++i) {
        if (i) hint += ", ";
        hint += ranked[i].second;
    }
    throw Error(ErrorCode::UnknownActivity, "unknown activity '" + std::string(name) + "'; closest: " + hint,
                std::string(name));
}

std::string_view to_string(SpatialRelation8 r) { return kSpatialNames.at(static_cast<std::size_t>(r)); }

SpatialRelation8 spatial_relation_label(const PoseFrame& frame, const SceneObject& object, double proximity) {
    const Vec3 pelvis = frame_location(frame);
    const double d = horizontal_distance(pelvis, object.box.center);
    const bool near = d <= proximity;
    if (d == 0.0) return SpatialRelation8::FrontNear;

    const Vec2 to_object{object.box.center.x - pelvis.x, object.box.center.y - pelvis.y};
    const double heading = signed_heading_angle(facing_direction(frame), to_object);
    std::size_t direction = 0;
    switch (direction_sector(heading)) {
        case OrientationCategory::FacingTowards: direction = 0; break;
        case OrientationCategory::OnLeft: direction = 1; break;
        case OrientationCategory::OnRight: direction = 2; break;
        default: direction = 3; break;
    }
    return static_cast<SpatialRelation8>(direction * 2 + (near ? 0 : 1));
}

ContactTensor::ContactTensor(std::size_t objects, std::size_t frames, std::size_t joints)
    : objects_(objects), frames_(frames), joints_(joints), bits_(objects * frames * joints, 0) {}

std::size_t ContactTensor::offset(std::size_t i, std::size_t t, std::size_t l) const {
    if (i >= objects_ || t >= frames_ || l >= joints_) {
        throw Error(ErrorCode::OutOfRange, "contact tensor index out of range");
    }
    return (i * frames_ + t) * joints_ + l;
}

std::size_t ContactTensor::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<std::uint8_t> ContactTensor::pack() const {
    std::vector<std::uint8_t> bytes((bits_.size() + 7) / 8, 0);
    for (std::size_t n = 0; n < bits_.size(); ++n) {
        if (bits_[n]) bytes[n / 8] |= static_cast<std::uint8_t>(0x80u >> (n % 8));
    }
    return bytes;
}

ContactTensor ContactTensor::unpack(std::span<const std::uint8_t> bytes, std::size_t objects, std::size_t frames,
                                    std::size_t joints) {
    ContactTensor tensor(objects, frames, joints);
    if (bytes.size() != (tensor.bits_.size() + 7) / 8) {
        throw Error(ErrorCode::ShapeMismatch, "packed contact bits do not match shape");
    }
    for (std::size_t n = 0; n < tensor.bits_.size(); ++n) {
        tensor.bits_[n] = (bytes[n / 8] >> (7 - n % 8)) & 1u;
    }
    const std::size_t used = tensor.bits_.size() % 8;
    if (used != 0 && (bytes.back() & (0xFFu >> used)) != 0) {
        throw Error(ErrorCode::Schema, "packed contact bits have non-zero padding");
    }
    return tensor;
}

ContactTensor contact_label_matrix(std::span<const FrameAnnotation> annotations, const Scene& scene,
                                   const MotionSequence& motion, double epsilon) {
    const std::size_t frames = motion.size();
    std::vector<const FrameAnnotation*> by_frame(frames, nullptr);
    for (const FrameAnnotation& a : annotations) {
        if (a.frame_index >= frames) {
            throw Error(ErrorCode::ShapeMismatch, "annotation frame outside motion", std::to_string(a.frame_index));
        }
        by_frame[a.frame_index] = &a;
    }

    ContactTensor tensor(scene.size(), frames);
    for (std::size_t t = 0; t < frames; ++t) {
        const std::vector<ContactTuple> computed =
            by_frame[t] ? std::vector<ContactTuple>{} : detect_contacts(motion[t], scene, epsilon);
        const std::vector<ContactTuple>& contacts = by_frame[t] ? by_frame[t]->contacts : computed;
        for (const ContactTuple& c : contacts) {
            tensor.set(scene.index_of(c.object_id), t, joint_index(c.joint));
        }
    }
    return tensor;
}

std::vector<std::size_t> knearest_object_indices(const PoseFrame& frame, const Scene& scene, std::size_t k) {
    if (k == 0) throw Error(ErrorCode::Precondition, "k must be >= 1");
    const Vec3 pelvis = frame_location(frame);
    std::vector<std::tuple<double, std::string_view, std::size_t>> ranked;
    for (std::size_t i = 0; i < scene.size(); ++i) {
        ranked.emplace_back(horizontal_distance(pelvis, scene[i].box.center), scene[i].id, i);
    }
    const std::size_t take = std::min(k, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take), ranked.end());
    std::vector<std::size_t> indices;
    for (std::size_t n = 0; n < take; ++n) indices.push_back(std::get<2>(ranked[n]));
    return indices;
}

AuxLabels build_aux_labels(const Scene& scene, const MotionSequence& motion, std::size_t activity,
                           std::span<const FrameAnnotation> annotations, const AuxLabelConfig& config) {
    AuxLabels labels;
    labels.activity = activity;
    labels.objects = scene.size();
    labels.frames = motion.size();
    labels.spatial.reserve(labels.objects * labels.frames);
    for (std::size_t i = 0; i < labels.objects; ++i) {
        for (std::size_t t = 0; t < labels.frames; ++t) {
            labels.spatial.push_back(spatial_relation_label(motion[t], scene[i], config.proximity));
        }
    }
    labels.contact = contact_label_matrix(annotations, scene, motion, config.contact_epsilon);
    labels.k = std::min(config.k, scene.size());
    for (std::size_t t = 0; t < labels.frames; ++t) {
        const auto row = knearest_object_indices(motion[t], scene, config.k);
        labels.knn.insert(labels.knn.end(), row.begin(), row.end());
    }
    return labels;
}

nlohmann::json aux_labels_to_json(const AuxLabels& labels) {
    std::vector<std::uint8_t> spatial;
    spatial.reserve(labels.spatial.size());
    for (SpatialRelation8 r : labels.spatial) spatial.push_back(static_cast<std::uint8_t>(r));
    nlohmann::json classes = nlohmann::json::array();
    for (auto n : kSpatialNames) classes.push_back(n);
    return {
        {"schema_version", kAuxLabelsSchema},
        {"activity", labels.activity},
        {"spatial",
         {{"shape", {labels.objects, labels.frames}},
          {"taxonomy", kSpatialTaxonomyVersion},
          {"classes", classes},
          {"values", spatial}}},
        {"contact",
         {{"shape", {labels.contact.objects(), labels.contact.frames(), labels.contact.joints()}},
          {"encoding", "base64-msb-first"},
          {"bits", base64_encode(labels.contact.pack())}}},
        {"knn", {{"shape", {labels.frames, labels.k}}, {"values", labels.knn}}},
    };
}

AuxLabels aux_labels_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema_version").get<std::string>() != kAuxLabelsSchema) {
            throw Error(ErrorCode::Schema, "unsupported aux label schema", j.at("schema_version").dump());
        }
        AuxLabels labels;
        labels.activity = j.at("activity").get<std::size_t>();
        const auto& spatial = j.at("spatial");
        labels.objects = spatial.at("shape").at(0).get<std::size_t>();
        labels.frames = spatial.at("shape").at(1).get<std::size_t>();
        for (const auto& v : spatial.at("values")) {
            const auto raw = v.get<std::size_t>();
            if (raw >= kSpatialClasses) throw Error(ErrorCode::Schema, "spatial class out of range");
            labels.spatial.push_back(static_cast<SpatialRelation8>(raw));
        }
        if (labels.spatial.size() != labels.objects * labels.frames) {
            throw Error(ErrorCode::ShapeMismatch, "spatial values do not match shape");
        }
        const auto& contact = j.at("contact");
        const auto& shape = contact.at("shape");
        labels.contact = ContactTensor::unpack(base64_decode(contact.at("bits").get<std::string>()),
                                               shape.at(0).get<std::size_t>(), shape.at(1).get<std::size_t>(),
                                               shape.at(2).get<std::size_t>());
        const auto& knn = j.at("knn");
        labels.k = knn.at("shape").at(1).get<std::size_t>();
        labels.knn = knn.at("values").get<std::vector<std::size_t>>();
        if (labels.knn.size() != labels.frames * labels.k) {
            throw Error(ErrorCode::ShapeMismatch, "knn values do not match shape");
        }
        return labels;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Schema, std::string("malformed aux labels: ") + e.what());
    }
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < bytes.size(); i += 3) {
        const std::size_t n = std::min<std::size_t>(3, bytes.size() - i);
        std::uint32_t chunk = static_cast<std::uint32_t>(bytes[i]) << 16;
        if (n > 1) chunk |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
        if (n > 2) chunk |= bytes[i + 2];
        for (std::size_t c = 0; c < 4; ++c) {
            out.push_back(c <= n ? kBase64Alphabet[(chunk >> (18 - 6 * c)) & 0x3f] : '=');
        }
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    if (text.size() % 4 != 0) throw Error(ErrorCode::Parse, "base64 length must be a multiple of 4");
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < text.size(); i += 4) {
        std::uint32_t chunk = 0;
        std::size_t pad = 0;
        for (std::size_t c = 0; c < 4; ++c) {
            const char ch = text[i + c];
            std::uint32_t value = 0;
            if (ch == '=') {
                ++pad;
            } else {
                const auto pos = kBase64Alphabet.find(ch);
                if (pos == std::string_view::npos || pad) throw Error(ErrorCode::Parse, "invalid base64 character");
                value = static_cast<std::uint32_t>(pos);
            }
            chunk = (chunk << 6) | value;
        }
        if (pad > 2 || (pad && i + 4 != text.size())) throw Error(ErrorCode::Parse, "invalid base64 padding");
        out.push_back(static_cast<std::uint8_t>(chunk >> 16));
        if (pad < 2) out.push_back(static_cast<std::uint8_t>(chunk >> 8));
        if (pad < 1) out.push_back(static_cast<std::uint8_t>(chunk));
    }
    return out;
}

}  // namespace hisqa
