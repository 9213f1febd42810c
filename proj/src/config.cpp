#include "hisqa/config.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "hisqa/error.hpp"

namespace hisqa {

namespace {

void require_positive(double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::Precondition, std::string(key) + " must be > 0", key);
}

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int size = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &size, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::Io, "SHA-256 digest failed");
    }
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < size; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

template <class T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void EngineConfig::validate() const {
    require_positive(interaction.contact_epsilon, "epsilon_m");
    require_positive(interaction.at_radius, "r_at_m");
    require_positive(interaction.between_radius, "r_between_m");
    require_positive(interaction.between_symmetry, "alpha_sym_rad");
    require_positive(proximity, "theta_prox_m");
    require_positive(graph.near_distance, "theta_near_m");
    require_positive(graph.overlap_ratio, "theta_overlap");
    if (stride == 0) throw Error(ErrorCode::Precondition, "key_frame_stride must be > 0", "key_frame_stride");
    if (k == 0) throw Error(ErrorCode::Precondition, "k_nearest must be > 0", "k_nearest");
    if (embed_dim == 0 || embed_dim % 2 != 0) {
        throw Error(ErrorCode::Precondition, "embed_dim must be positive and even", "embed_dim");
    }
    if (hidden_width == 0) throw Error(ErrorCode::Precondition, "hidden_width must be > 0", "hidden_width");
    if (loss.activity < 0.0 || loss.spatial < 0.0 || loss.contact < 0.0) {
        throw Error(ErrorCode::Precondition, "loss weights must be >= 0", "lambda");
    }
    require_positive(llm.timeout_s, "llm.timeout_s");
    if (llm.retries < 0) throw Error(ErrorCode::Precondition, "llm.retries must be >= 0", "llm.retries");
    if (llm.max_in_flight == 0) throw Error(ErrorCode::Precondition, "llm.max_in_flight must be > 0", "llm.max_in_flight");
}

nlohmann::json config_to_json(const EngineConfig& c) {
    return {
        {"epsilon_m", c.interaction.contact_epsilon},
        {"r_at_m", c.interaction.at_radius},
        {"r_between_m", c.interaction.between_radius},
        {"alpha_sym_rad", c.interaction.between_symmetry},
        {"theta_prox_m", c.proximity},
        {"theta_near_m", c.graph.near_distance},
        {"theta_overlap", c.graph.overlap_ratio},
        {"key_frame_stride", c.stride},
        {"contact_change_key_frames", c.contact_change_key_frames},
        {"k_nearest", c.k},
        {"embed_dim", c.embed_dim},
        {"hidden_width", c.hidden_width},
        {"seed", c.seed},
        {"lambda_act", c.loss.activity},
        {"lambda_spa", c.loss.spatial},
        {"lambda_cont", c.loss.contact},
        {"llm",
         {{"endpoint", c.llm.endpoint},
          {"model", c.llm.model},
          {"token_env", c.llm.token_env},
          {"temperature", c.llm.temperature},
          {"timeout_s", c.llm.timeout_s},
          {"retries", c.llm.retries},
          {"backoff_s", c.llm.backoff_s},
          {"max_in_flight", c.llm.max_in_flight}}},
    };
}

EngineConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::Schema, "config must be a JSON object");
    static const std::set<std::string> known = {
        "epsilon_m",   "r_at_m",    "r_between_m", "alpha_sym_rad", "theta_prox_m", "theta_near_m",
        "theta_overlap", "key_frame_stride", "contact_change_key_frames", "k_nearest", "embed_dim",
        "hidden_width", "seed", "lambda_act", "lambda_spa", "lambda_cont", "llm",
    };
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) throw Error(ErrorCode::Schema, "unknown config key", key);
    }
    EngineConfig c;
    try {
        read_key(j, "epsilon_m", c.interaction.contact_epsilon);
        read_key(j, "r_at_m", c.interaction.at_radius);
        read_key(j, "r_between_m", c.interaction.between_radius);
        read_key(j, "alpha_sym_rad", c.interaction.between_symmetry);
        read_key(j, "theta_prox_m", c.proximity);
        read_key(j, "theta_near_m", c.graph.near_distance);
        read_key(j, "theta_overlap", c.graph.overlap_ratio);
        read_key(j, "key_frame_stride", c.stride);
        read_key(j, "contact_change_key_frames", c.contact_change_key_frames);
        read_key(j, "k_nearest", c.k);
        read_key(j, "embed_dim", c.embed_dim);
        read_key(j, "hidden_width", c.hidden_width);
        read_key(j, "seed", c.seed);
        read_key(j, "lambda_act", c.loss.activity);
        read_key(j, "lambda_spa", c.loss.spatial);
        read_key(j, "lambda_cont", c.loss.contact);
        if (j.contains("llm")) {
            const auto& l = j.at("llm");
            if (!l.is_object()) throw Error(ErrorCode::Schema, "config key 'llm' must be an object", "llm");
            static const std::set<std::string> llm_known = {
                "endpoint", "model", "token_env", "temperature", "timeout_s", "retries", "backoff_s", "max_in_flight",
            };
            for (const auto& [key, value] : l.items()) {
                if (!llm_known.contains(key)) throw Error(ErrorCode::Schema, "unknown config key", "llm." + key);
            }
            read_key(l, "endpoint", c.llm.endpoint);
            read_key(l, "model", c.llm.model);
            read_key(l, "token_env", c.llm.token_env);
            read_key(l, "temperature", c.llm.temperature);
            read_key(l, "timeout_s", c.llm.timeout_s);
            read_key(l, "retries", c.llm.retries);
            read_key(l, "backoff_s", c.llm.backoff_s);
            read_key(l, "max_in_flight", c.llm.max_in_flight);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Schema, std::string("bad config value: ") + e.what());
    }
    c.validate();
    return c;
}

EngineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open config file", path.string());
    try {
        return config_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Schema, std::string("invalid config JSON: ") + e.what(), path.string());
    }
}

std::string config_hash(const EngineConfig& config) {
    nlohmann::json canonical = config_to_json(config);
    canonical["versions"] = {
        {"aux_labels", kAuxLabelsSchema},
        {"spatial_taxonomy", kSpatialTaxonomyVersion},
        {"kernels", kKernelSemantics},
        {"prompts", kPromptVersion},
    };
    return sha256_hex(canonical.dump());
}

}  // namespace hisqa
