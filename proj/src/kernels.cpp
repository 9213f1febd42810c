#include "hisqa/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "hisqa/error.hpp"

namespace hisqa {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

double unit_uniform(std::mt19937_64& rng) {
    // 53 random bits in (0, 1]; never 0 so log() below is finite
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

Embedding sincos(const Eigen::VectorXd& y) {
    Embedding out(2 * y.size());
    for (Eigen::Index j = 0; j < y.size(); ++j) {
        out[j] = std::sin(y[j]);
        out[j + y.size()] = std::cos(y[j]);
    }
    return out;
}

void require_dim(const ProjectionWeights& w, std::size_t in_dim, std::string_view what) {
    if (w.in_dim() != in_dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(what) + " expects input dimension " + std::to_string(in_dim) + ", got " +
                        std::to_string(w.in_dim()));
    }
}

double log_sum_exp(const Eigen::VectorXd& v) {
    const double peak = v.maxCoeff();
    return peak + std::log((v.array() - peak).exp().sum());
}

// log(1 + exp(z)) without overflow
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

void check_pair_shapes(std::span<const Embedding> scene, std::span<const Embedding> motion,
                       const ProjectionWeights& scene_proj, const ProjectionWeights& motion_proj,
                       std::size_t classes) {
    if (scene_proj.out_dim() != classes || motion_proj.out_dim() != classes) {
        throw Error(ErrorCode::ShapeMismatch, "projection output must have " + std::to_string(classes) + " classes");
    }
    for (const auto& s : scene) {
        if (static_cast<std::size_t>(s.size()) != scene_proj.in_dim()) {
            throw Error(ErrorCode::ShapeMismatch, "scene embedding dimension mismatch");
        }
    }
    for (const auto& m : motion) {
        if (static_cast<std::size_t>(m.size()) != motion_proj.in_dim()) {
            throw Error(ErrorCode::ShapeMismatch, "motion embedding dimension mismatch");
        }
    }
}

PairLoss init_pair_loss(std::span<const Embedding> scene, std::span<const Embedding> motion,
                        const ProjectionWeights& scene_proj, const ProjectionWeights& motion_proj) {
    PairLoss r;
    for (const auto& s : scene) r.d_scene.push_back(Eigen::VectorXd::Zero(s.size()));
    for (const auto& m : motion) r.d_motion.push_back(Eigen::VectorXd::Zero(m.size()));
    r.d_scene_proj = Eigen::MatrixXd::Zero(scene_proj.matrix.rows(), scene_proj.matrix.cols());
    r.d_motion_proj = Eigen::MatrixXd::Zero(motion_proj.matrix.rows(), motion_proj.matrix.cols());
    return r;
}

// Shared backward pass for the product-of-projections logits.
template <class PerPair>
PairLoss pair_loss(std::span<const Embedding> scene, std::span<const Embedding> motion,
                   const ProjectionWeights& scene_proj, const ProjectionWeights& motion_proj, PerPair&& per_pair) {
    PairLoss r = init_pair_loss(scene, motion, scene_proj, motion_proj);
    std::vector<Eigen::VectorXd> a, b;
    for (const auto& s : scene) a.push_back(scene_proj.apply(s));
    for (const auto& m : motion) b.push_back(motion_proj.apply(m));

    Eigen::VectorXd d_logits;
    for (std::size_t i = 0; i < scene.size(); ++i) {
        for (std::size_t t = 0; t < motion.size(); ++t) {
            const Eigen::VectorXd logits = a[i].cwiseProduct(b[t]);
            r.loss += per_pair(i, t, logits, d_logits);
            const Eigen::VectorXd da = d_logits.cwiseProduct(b[t]);
            const Eigen::VectorXd db = d_logits.cwiseProduct(a[i]);
            r.d_scene[i] += scene_proj.matrix * da;
            r.d_motion[t] += motion_proj.matrix * db;
            r.d_scene_proj += scene[i] * da.transpose();
            r.d_motion_proj += motion[t] * db.transpose();
        }
    }
    return r;
}

}  // namespace

ProjectionWeights ProjectionWeights::gaussian(std::size_t in_dim, std::size_t out_dim, std::uint64_t seed) {
    if (in_dim == 0 || out_dim == 0) throw Error(ErrorCode::Precondition, "projection dimensions must be positive");
    std::mt19937_64 rng(seed);
    const double stddev = 1.0 / std::sqrt(static_cast<double>(in_dim));
    ProjectionWeights w{Eigen::MatrixXd(in_dim, out_dim), seed};
    for (Eigen::Index r = 0; r < w.matrix.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.matrix.cols(); ++c) {
            const double u1 = unit_uniform(rng);
            const double u2 = unit_uniform(rng);
            w.matrix(r, c) = stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
        }
    }
    return w;
}

ProjectionWeights ProjectionWeights::zeros(std::size_t in_dim, std::size_t out_dim) {
    return {Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(in_dim), static_cast<Eigen::Index>(out_dim)), 0};
}

void write_weights(std::ostream& out, const ProjectionWeights& w) {
    const nlohmann::json header = {
        {"in_dim", w.in_dim()},
        {"out_dim", w.out_dim()},
        {"seed", w.seed},
        {"semantics_version", kKernelSemantics},
    };
    out << header.dump() << '\n';
    for (Eigen::Index r = 0; r < w.matrix.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.matrix.cols(); ++c) {
            std::uint64_t bits = std::bit_cast<std::uint64_t>(w.matrix(r, c));
            char bytes[8];
            for (int k = 0; k < 8; ++k) bytes[k] = static_cast<char>((bits >> (8 * k)) & 0xff);
            out.write(bytes, 8);
        }
    }
    if (!out) throw Error(ErrorCode::Io, "failed to write weights");
}

ProjectionWeights read_weights(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::Parse, "missing weights header");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("bad weights header: ") + e.what(), line);
    }
    if (header.value("semantics_version", "") != kKernelSemantics) {
        throw Error(ErrorCode::Schema, "unsupported weights semantics", line);
    }
    const auto rows = header.at("in_dim").get<Eigen::Index>();
    const auto cols = header.at("out_dim").get<Eigen::Index>();
    ProjectionWeights w{Eigen::MatrixXd(rows, cols), header.at("seed").get<std::uint64_t>()};
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            unsigned char bytes[8];
            if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw Error(ErrorCode::Parse, "truncated weights payload");
            std::uint64_t bits = 0;
            for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
            w.matrix(r, c) = std::bit_cast<double>(bits);
        }
    }
    return w;
}

Vec3 normalize_location(const Vec3& location, const Vec3& lower, const Vec3& upper) {
    auto axis = [](double v, double lo, double hi) {
        const double extent = hi - lo;
        if (!(extent > 0.0)) return 0.5;
        return std::clamp((v - lo) / extent, 0.0, 1.0);
    };
    return {axis(location.x, lower.x, upper.x), axis(location.y, lower.y, upper.y), axis(location.z, lower.z, upper.z)};
}

Embedding sf_encode(const Vec3& unit_location, const ProjectionWeights& phi_sf) {
    require_dim(phi_sf, 3, "spatial Fourier projection");
    const Eigen::Vector3d arg(kTwoPi * unit_location.x, kTwoPi * unit_location.y, kTwoPi * unit_location.z);
    return sincos(phi_sf.apply(arg));
}

Embedding tf_encode(std::size_t t, std::size_t frames, const ProjectionWeights& phi_tf) {
    require_dim(phi_tf, 1, "temporal Fourier projection");
    if (t < 1 || t > frames) {
        throw Error(ErrorCode::OutOfRange, "timestamp must be in [1, T]", std::to_string(t));
    }
    Eigen::VectorXd arg(1);
    arg[0] = kTwoPi * (static_cast<double>(t) / static_cast<double>(frames));
    return sincos(phi_tf.apply(arg));
}

Embedding motion_pos_encoding(std::size_t t, std::size_t frames, const Vec3& unit_location,
                              const ProjectionWeights& phi_sf, const ProjectionWeights& phi_tf) {
    if (phi_sf.out_dim() != phi_tf.out_dim()) {
        throw Error(ErrorCode::DimensionMismatch, "spatial and temporal encodings differ in width");
    }
    return sf_encode(unit_location, phi_sf) + tf_encode(t, frames, phi_tf);
}

Embedding object_pos_encoding(const Vec3& unit_location, std::size_t frames, const ProjectionWeights& phi_sf,
                              const ProjectionWeights& phi_tf) {
    if (phi_sf.out_dim() != phi_tf.out_dim()) {
        throw Error(ErrorCode::DimensionMismatch, "spatial and temporal encodings differ in width");
    }
    if (frames == 0) throw Error(ErrorCode::Precondition, "T must be >= 1");
    Embedding temporal = Embedding::Zero(static_cast<Eigen::Index>(2 * phi_tf.out_dim()));
    for (std::size_t t = 1; t <= frames; ++t) temporal += tf_encode(t, frames, phi_tf);
    return sf_encode(unit_location, phi_sf) + temporal / static_cast<double>(frames);
}

Embedding apply_position(const Embedding& x, const Embedding& encoding) {
    if (x.size() != encoding.size()) throw Error(ErrorCode::DimensionMismatch, "embedding widths differ");
    return x + encoding;
}

Embedding fuse_context(const Embedding& motion, std::span<const Embedding> neighbors) {
    if (neighbors.empty()) throw Error(ErrorCode::Precondition, "context fusion needs at least one neighbor");
    Embedding sum = Embedding::Zero(motion.size());
    for (const auto& n : neighbors) {
        if (n.size() != motion.size()) throw Error(ErrorCode::DimensionMismatch, "neighbor width differs");
        sum += n;
    }
    return motion + sum / static_cast<double>(neighbors.size());
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    const Eigen::VectorXd e = (logits.array() - logits.maxCoeff()).exp().matrix();
    return e / e.sum();
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

ActivityHead ActivityHead::gaussian(std::size_t dim, std::size_t width, std::size_t classes, std::uint64_t seed) {
    return {
        ProjectionWeights::gaussian(dim, width, seed),
        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(width)),
        ProjectionWeights::gaussian(width, classes, seed + 1),
        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(classes)),
    };
}

ActivityLoss act_loss(std::span<const Embedding> fused, std::size_t target, const ActivityHead& head) {
    if (fused.empty()) throw Error(ErrorCode::Precondition, "activity loss needs at least one frame");
    if (target >= head.classes()) {
        throw Error(ErrorCode::OutOfRange, "activity target outside the class range", std::to_string(target));
    }
    const auto dim = static_cast<Eigen::Index>(head.hidden.in_dim());
    if (head.output.in_dim() != head.hidden.out_dim() ||
        head.hidden_bias.size() != static_cast<Eigen::Index>(head.hidden.out_dim()) ||
        head.output_bias.size() != static_cast<Eigen::Index>(head.output.out_dim())) {
        throw Error(ErrorCode::ShapeMismatch, "activity head layers are inconsistent");
    }

    Eigen::VectorXd pooled = Eigen::VectorXd::Zero(dim);
    for (const auto& f : fused) {
        if (f.size() != dim) throw Error(ErrorCode::ShapeMismatch, "fused embedding width differs from head input");
        pooled += f;
    }
    pooled /= static_cast<double>(fused.size());

    const Eigen::VectorXd pre = head.hidden.apply(pooled) + head.hidden_bias;
    const Eigen::VectorXd hidden = pre.cwiseMax(0.0);
    const Eigen::VectorXd logits = head.output.apply(hidden) + head.output_bias;

    ActivityLoss r;
    r.loss = log_sum_exp(logits) - logits[static_cast<Eigen::Index>(target)];

    Eigen::VectorXd d_logits = softmax(logits);
    d_logits[static_cast<Eigen::Index>(target)] -= 1.0;
    r.d_output = hidden * d_logits.transpose();
    r.d_output_bias = d_logits;
    Eigen::VectorXd d_pre = head.output.matrix * d_logits;
    for (Eigen::Index j = 0; j < pre.size(); ++j) {
        if (pre[j] <= 0.0) d_pre[j] = 0.0;
    }
    r.d_hidden = pooled * d_pre.transpose();
    r.d_hidden_bias = d_pre;
    const Eigen::VectorXd d_pooled = head.hidden.matrix * d_pre / static_cast<double>(fused.size());
    r.d_fused.assign(fused.size(), d_pooled);
    return r;
}

PairLoss spa_loss(std::span<const Embedding> scene, std::span<const Embedding> motion,
                  std::span<const SpatialRelation8> targets, const ProjectionWeights& scene_proj,
                  const ProjectionWeights& motion_proj) {
    check_pair_shapes(scene, motion, scene_proj, motion_proj, kSpatialClasses);
    if (targets.size() != scene.size() * motion.size()) {
        throw Error(ErrorCode::ShapeMismatch, "spatial targets must be N x T");
    }
    return pair_loss(scene, motion, scene_proj, motion_proj,
                     [&](std::size_t i, std::size_t t, const Eigen::VectorXd& logits, Eigen::VectorXd& d_logits) {
                         const auto target = static_cast<Eigen::Index>(targets[i * motion.size() + t]);
                         d_logits = softmax(logits);
                         d_logits[target] -= 1.0;
                         return log_sum_exp(logits) - logits[target];
                     });
}

PairLoss cont_loss(std::span<const Embedding> scene, std::span<const Embedding> motion,
                   const ContactTensor& targets, const ProjectionWeights& scene_proj,
                   const ProjectionWeights& motion_proj) {
    check_pair_shapes(scene, motion, scene_proj, motion_proj, targets.joints());
    if (targets.objects() != scene.size() || targets.frames() != motion.size()) {
        throw Error(ErrorCode::ShapeMismatch, "contact targets must be N x T x J");
    }
    return pair_loss(scene, motion, scene_proj, motion_proj,
                     [&](std::size_t i, std::size_t t, const Eigen::VectorXd& logits, Eigen::VectorXd& d_logits) {
                         double loss = 0.0;
                         d_logits.resize(logits.size());
                         for (Eigen::Index l = 0; l < logits.size(); ++l) {
                             const double y = targets.get(i, t, static_cast<std::size_t>(l)) ? 1.0 : 0.0;
                             loss += softplus(logits[l]) - y * logits[l];
                             d_logits[l] = sigmoid(logits[l]) - y;
                         }
                         return loss;
                     });
}

double combine_losses(double act, double spa, double cont, const LossWeights& weights) {
    if (weights.activity < 0.0 || weights.spatial < 0.0 || weights.contact < 0.0) {
        throw Error(ErrorCode::Precondition, "loss weights must be non-negative");
    }
    return weights.activity * act + weights.spatial * spa + weights.contact * cont;
}

}  // namespace hisqa
