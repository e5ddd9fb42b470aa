#include "vad/gateway/backend.hpp"

namespace vad {

std::string_view role_name(ModelRole role) {
    switch (role) {
        case ModelRole::Scorer: return "scorer";
        case ModelRole::Captioner: return "captioner";
        case ModelRole::ImageEmbedder: return "image_embedder";
        case ModelRole::JointEmbedder: return "joint_embedder";
        case ModelRole::Judge: return "judge";
    }
    return "?";
}

ModelRole parse_role(std::string_view name) {
    for (auto r : {ModelRole::Scorer, ModelRole::Captioner, ModelRole::ImageEmbedder,
                   ModelRole::JointEmbedder, ModelRole::Judge}) {
        if (role_name(r) == name) return r;
    }
    throw ConfigError("unknown model role '" + std::string(name) + "'");
}

void ModelEndpoint::validate() const {
    if (!(timeout_seconds > 0.0)) {
        throw ConfigError("endpoint '" + std::string(role_name(role)) + "': timeout must be > 0");
    }
    if (max_retries < 0) {
        throw ConfigError("endpoint '" + std::string(role_name(role)) +
                          "': max_retries must be non-negative");
    }
    if (role == ModelRole::Judge && max_retries > 3) {
        throw ConfigError("endpoint 'judge': max_retries must be <= 3");
    }
}

}  // namespace vad
