#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vad/cea.hpp"
#include "vad/gateway/backend.hpp"
#include "vad/rea.hpp"

namespace vad::pipeline {

enum class BackendKind { Http, Scripted };

std::string_view backend_name(BackendKind k);
BackendKind parse_backend(std::string_view name);

struct EvalConfig {
    double sigma_smooth = 16.0;  // frames; <= 0 disables smoothing
    double binarize = 0.5;       // mIoU and event counting threshold
    bool judge = true;           // run the explanation judge when a judge endpoint exists
};

struct PipelineConfig {
    std::size_t segment_len = 16;
    cea::CeaConfig cea;
    rea::ReaConfig rea;
    EvalConfig eval;
    std::vector<ModelEndpoint> endpoints;
    BackendKind backend = BackendKind::Scripted;
    std::string cache_dir;  // empty disables the response cache
    std::uint64_t seed = 0;

    void validate() const;
};

// Defaults fill absent keys. Unknown keys and invariant violations raise
// ConfigError naming the offending field.
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig load_config_text(const std::string& text);

/// Full, normalized form (every field present).
nlohmann::json to_json(const PipelineConfig& config);

/// Applies a dotted-key override such as "cea.delta_sim" to a config JSON.
void apply_override(nlohmann::json& config_json, const std::string& dotted_key,
                    const nlohmann::json& value);

}  // namespace vad::pipeline
