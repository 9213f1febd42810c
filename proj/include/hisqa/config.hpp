#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "hisqa/interaction.hpp"
#include "hisqa/kernels.hpp"
#include "hisqa/scene.hpp"
#include "hisqa/textgen.hpp"

namespace hisqa {

struct EngineConfig {
    InteractionConfig interaction;
    SceneGraphConfig graph;
    double proximity = 2.0;  // near/far split of the spatial labels, meters
    std::size_t stride = 30;
    bool contact_change_key_frames = false;
    std::size_t k = 3;
    std::size_t embed_dim = 64;
    std::size_t hidden_width = 64;
    std::uint64_t seed = 0;
    LossWeights loss;
    LlmSettings llm;

    // Throws Precondition naming the first invalid key.
    void validate() const;
    AuxLabelConfig aux() const { return {interaction.contact_epsilon, proximity, k}; }
};

// Keys carry units where they are lengths or angles ("epsilon_m", "alpha_sym_rad").
// Unknown keys are rejected.
nlohmann::json config_to_json(const EngineConfig& config);
EngineConfig config_from_json(const nlohmann::json& j);
EngineConfig load_config(const std::filesystem::path& path);

// Hex SHA-256 of the canonical JSON form, including version strings of the
// label taxonomy, kernel semantics and prompts.
std::string config_hash(const EngineConfig& config);

}  // namespace hisqa
