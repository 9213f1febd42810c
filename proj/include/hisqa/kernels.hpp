#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "hisqa/aux_labels.hpp"
#include "hisqa/geometry.hpp"

namespace hisqa {

using Embedding = Eigen::VectorXd;

// Versioned reading of the kernels: "." between projections is an elementwise
// product, temporal encodings use t / T.
inline constexpr std::string_view kKernelSemantics = "hisqa.kernels/1";

// Linear map stored as an in_dim x out_dim matrix; apply() computes M^T x.
struct ProjectionWeights {
    Eigen::MatrixXd matrix;
    std::uint64_t seed = 0;

    std::size_t in_dim() const { return static_cast<std::size_t>(matrix.rows()); }
    std::size_t out_dim() const { return static_cast<std::size_t>(matrix.cols()); }
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return matrix.transpose() * x; }

    // Gaussian entries with standard deviation 1/sqrt(in_dim). Uses mt19937_64
    // and an explicit Box-Muller transform so values do not depend on the
    // standard library's distribution implementations.
    static ProjectionWeights gaussian(std::size_t in_dim, std::size_t out_dim, std::uint64_t seed);
    static ProjectionWeights zeros(std::size_t in_dim, std::size_t out_dim);
};

// Header line of JSON {in_dim, out_dim, seed, semantics_version}, a newline,
// then in_dim*out_dim little-endian doubles in row-major order.
void write_weights(std::ostream& out, const ProjectionWeights& w);
ProjectionWeights read_weights(std::istream& in);

// ---- position encodings ----

// Maps a location into [0,1]^3 by the given bounds (clamped; degenerate axes map to 0.5).
Vec3 normalize_location(const Vec3& location, const Vec3& lower, const Vec3& upper);

// [sin(y) ; cos(y)] with y = phi^T (2 pi mu); phi is 3 x d/2.
Embedding sf_encode(const Vec3& unit_location, const ProjectionWeights& phi_sf);
// Same construction on the scalar t / T; phi is 1 x d/2 and 1 <= t <= T.
Embedding tf_encode(std::size_t t, std::size_t frames, const ProjectionWeights& phi_tf);

Embedding motion_pos_encoding(std::size_t t, std::size_t frames, const Vec3& unit_location,
                              const ProjectionWeights& phi_sf, const ProjectionWeights& phi_tf);
// SF(mu) plus the mean temporal encoding over t = 1..T.
Embedding object_pos_encoding(const Vec3& unit_location, std::size_t frames, const ProjectionWeights& phi_sf,
                              const ProjectionWeights& phi_tf);

Embedding apply_position(const Embedding& x, const Embedding& encoding);

// m + mean(neighbors).
Embedding fuse_context(const Embedding& motion, std::span<const Embedding> neighbors);

// ---- auxiliary losses ----

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);
double sigmoid(double x);

// Two-layer perceptron d -> h (ReLU) -> C.
struct ActivityHead {
    ProjectionWeights hidden;
    Eigen::VectorXd hidden_bias;
    ProjectionWeights output;
    Eigen::VectorXd output_bias;

    std::size_t classes() const { return output.out_dim(); }
    static ActivityHead gaussian(std::size_t dim, std::size_t width, std::size_t classes, std::uint64_t seed);
};

struct ActivityLoss {
    double loss = 0.0;
    std::vector<Eigen::VectorXd> d_fused;
    Eigen::MatrixXd d_hidden;
    Eigen::VectorXd d_hidden_bias;
    Eigen::MatrixXd d_output;
    Eigen::VectorXd d_output_bias;
};

// Cross-entropy of softmax(head(mean_t fused_t)) against `target`.
ActivityLoss act_loss(std::span<const Embedding> fused, std::size_t target, const ActivityHead& head);

struct PairLoss {
    double loss = 0.0;
    std::vector<Eigen::VectorXd> d_scene;
    std::vector<Eigen::VectorXd> d_motion;
    Eigen::MatrixXd d_scene_proj;
    Eigen::MatrixXd d_motion_proj;
};

// Sum over (i, t) of CE(softmax(W_s^T s_i (*) W_m^T m_t), target(i, t)); targets N x T row-major.
PairLoss spa_loss(std::span<const Embedding> scene, std::span<const Embedding> motion,
                  std::span<const SpatialRelation8> targets, const ProjectionWeights& scene_proj,
                  const ProjectionWeights& motion_proj);

// Sum over (i, t) of the 22 binary cross-entropies of sigmoid(W_s^T s_i (*) W_m^T m_t).
PairLoss cont_loss(std::span<const Embedding> scene, std::span<const Embedding> motion,
                   const ContactTensor& targets, const ProjectionWeights& scene_proj,
                   const ProjectionWeights& motion_proj);

struct LossWeights {
    double activity = 0.5;
    double spatial = 0.5;
    double contact = 0.1;
};

double combine_losses(double act, double spa, double cont, const LossWeights& weights = {});

}  // namespace hisqa
