#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gradcheck.hpp"
#include "hisqa/error.hpp"
#include "hisqa/kernels.hpp"
#include "synth.hpp"

using namespace hisqa;
using namespace hisqa::testing;

namespace {

// Scalar reference for [sin(phi^T 2 pi x); cos(phi^T 2 pi x)].
std::vector<double> scalar_sincos(const std::vector<double>& x, const Eigen::MatrixXd& phi) {
    const std::size_t half = static_cast<std::size_t>(phi.cols());
    std::vector<double> out(2 * half);
    for (std::size_t j = 0; j < half; ++j) {
        double y = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) y += phi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) * 2.0 * kPi * x[k];
        out[j] = std::sin(y);
        out[half + j] = std::cos(y);
    }
    return out;
}

}  // namespace

TEST_CASE("sf_encode: frozen hand-computed value") {
    ProjectionWeights phi = ProjectionWeights::zeros(3, 2);
    phi.matrix(0, 0) = 1.0;
    phi.matrix(1, 1) = 1.0;
    const Embedding e = sf_encode({0.25, 0.5, 0.0}, phi);
    REQUIRE(e.size() == 4);
    CHECK(e[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(e[1]) < 1e-15);
    CHECK(std::abs(e[2]) < 1e-15);
    CHECK(e[3] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("sf/tf encodings equal the scalar sincos oracle") {
    Rng rng(61);
    const ProjectionWeights phi_sf = ProjectionWeights::gaussian(3, 16, 5);
    const ProjectionWeights phi_tf = ProjectionWeights::gaussian(1, 16, 6);
    for (int i = 0; i < 500; ++i) {
        const Vec3 mu{uniform(rng, 0, 1), uniform(rng, 0, 1), uniform(rng, 0, 1)};
        const Embedding e = sf_encode(mu, phi_sf);
        const auto ref = scalar_sincos({mu.x, mu.y, mu.z}, phi_sf.matrix);
        for (std::size_t j = 0; j < ref.size(); ++j) REQUIRE(e[static_cast<Eigen::Index>(j)] == doctest::Approx(ref[j]).epsilon(1e-12));

        const std::size_t frames = 1 + rng() % 200;
        const std::size_t t = 1 + rng() % frames;
        const Embedding te = tf_encode(t, frames, phi_tf);
        const auto tref = scalar_sincos({double(t) / double(frames)}, phi_tf.matrix);
        for (std::size_t j = 0; j < tref.size(); ++j) REQUIRE(te[static_cast<Eigen::Index>(j)] == doctest::Approx(tref[j]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(tf_encode(0, 10, phi_tf), Error);
    CHECK_THROWS_AS(tf_encode(11, 10, phi_tf), Error);
}

TEST_CASE("gaussian weights are seeded and scaled") {
    const auto a = ProjectionWeights::gaussian(64, 32, 9);
    const auto b = ProjectionWeights::gaussian(64, 32, 9);
    const auto c = ProjectionWeights::gaussian(64, 32, 10);
    CHECK(a.matrix == b.matrix);
    CHECK(a.matrix != c.matrix);
    const double var = a.matrix.array().square().mean();
    CHECK(var == doctest::Approx(1.0 / 64).epsilon(0.15));
}

TEST_CASE("weights file round trip is exact") {
    const auto w = ProjectionWeights::gaussian(3, 5, 77);
    std::stringstream s;
    write_weights(s, w);
    const auto back = read_weights(s);
    CHECK(back.seed == 77);
    CHECK(back.matrix == w.matrix);

    std::stringstream truncated(s.str().substr(0, s.str().size() - 3));
    CHECK_THROWS_AS(read_weights(truncated), Error);
}

TEST_CASE("location normalization") {
    const Vec3 lo{0, 0, 0}, hi{4, 2, 0};
    const Vec3 n = normalize_location({1, 3, 7}, lo, hi);
    CHECK(n.x == 0.25);
    CHECK(n.y == 1.0);
    CHECK(n.z == 0.5);
    CHECK(normalize_location({-1, -1, 0}, lo, hi).x == 0.0);
}

TEST_CASE("object encoding is SF plus the mean temporal encoding") {
    const auto phi_sf = ProjectionWeights::gaussian(3, 8, 1);
    const auto phi_tf = ProjectionWeights::gaussian(1, 8, 2);
    const Vec3 mu{0.3, 0.6, 0.9};
    const std::size_t frames = 37;
    Embedding sum = Embedding::Zero(16);
    for (std::size_t t = 1; t <= frames; ++t) sum += tf_encode(t, frames, phi_tf);
    const Embedding expected = sf_encode(mu, phi_sf) + sum / double(frames);
    CHECK((object_pos_encoding(mu, frames, phi_sf, phi_tf) - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((motion_pos_encoding(5, frames, mu, phi_sf, phi_tf) - (sf_encode(mu, phi_sf) + tf_encode(5, frames, phi_tf)))
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("apply_position and fuse_context") {
    Embedding x(3), p(3);
    x << 1, 2, 3;
    p << 0.5, 0.5, 0.5;
    CHECK(apply_position(x, p) == Embedding((Embedding(3) << 1.5, 2.5, 3.5).finished()));
    const std::vector<Embedding> neighbors{(Embedding(3) << 1, 0, 0).finished(), (Embedding(3) << 0, 1, 0).finished()};
    CHECK(fuse_context(x, neighbors) == Embedding((Embedding(3) << 1.5, 2.5, 3).finished()));
    CHECK_THROWS_AS(fuse_context(x, {}), Error);
    CHECK_THROWS_AS(apply_position(x, Embedding::Zero(4)), Error);
}

TEST_CASE("softmax and sigmoid are stable") {
    Eigen::VectorXd big(3);
    big << 1000, 1000, -1000;
    const auto s = softmax(big);
    CHECK(s[0] == doctest::Approx(0.5));
    CHECK(s[2] == 0.0);
    CHECK(sigmoid(800) == 1.0);
    CHECK(sigmoid(-800) >= 0.0);
    CHECK(sigmoid(0) == 0.5);
}

TEST_CASE("zero-logit losses") {
    const std::size_t d = 8, n = 3, t = 5;
    Rng rng(62);
    ActivityHead head{ProjectionWeights::zeros(d, 4), Eigen::VectorXd::Zero(4), ProjectionWeights::zeros(4, 4),
                      Eigen::VectorXd::Zero(4)};
    const auto fused = random_embeddings(rng, t, d);
    CHECK(act_loss(fused, 1, head).loss == doctest::Approx(std::log(4.0)).epsilon(1e-12));

    const auto scene = random_embeddings(rng, n, d);
    const auto motion = random_embeddings(rng, t, d);
    std::vector<SpatialRelation8> targets(n * t, SpatialRelation8::BackFar);
    const double spa = spa_loss(scene, motion, targets, ProjectionWeights::zeros(d, 8), ProjectionWeights::zeros(d, 8)).loss;
    CHECK(std::abs(spa - double(n * t) * std::log(8.0)) < 1e-9);

    ContactTensor contact(n, t);
    contact.set(0, 0, 3);
    const double cont = cont_loss(scene, motion, contact, ProjectionWeights::zeros(d, 22), ProjectionWeights::zeros(d, 22)).loss;
    CHECK(std::abs(cont - double(n * t) * 22.0 * std::log(2.0)) < 1e-9);
}

TEST_CASE("loss shape checks") {
    Rng rng(63);
    const auto scene = random_embeddings(rng, 2, 4);
    const auto motion = random_embeddings(rng, 3, 4);
    std::vector<SpatialRelation8> short_targets(5);
    CHECK_THROWS_AS(spa_loss(scene, motion, short_targets, ProjectionWeights::zeros(4, 8), ProjectionWeights::zeros(4, 8)),
                    Error);
    ContactTensor wrong(2, 4);
    CHECK_THROWS_AS(cont_loss(scene, motion, wrong, ProjectionWeights::zeros(4, 22), ProjectionWeights::zeros(4, 22)), Error);
    const auto head = ActivityHead::gaussian(4, 3, 2, 1);
    CHECK_THROWS_AS(act_loss(motion, 2, head), Error);
}

TEST_CASE("analytic gradients agree with central differences") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const GradReport r = check_gradients(seed);
        INFO("seed " << seed);
        CHECK(r.act < 1e-4);
        CHECK(r.spa < 1e-4);
        CHECK(r.cont < 1e-4);
    }
}

TEST_CASE("combined loss weights") {
    CHECK(combine_losses(1, 2, 10) == doctest::Approx(0.5 + 1.0 + 1.0));
    CHECK(combine_losses(1, 1, 1, {1, 0, 0}) == 1.0);
}
