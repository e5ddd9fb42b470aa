#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vad/common.hpp"
#include "vad/gateway/prompts.hpp"

namespace vad {

enum class ModelRole { Scorer, Captioner, ImageEmbedder, JointEmbedder, Judge };

std::string_view role_name(ModelRole role);
ModelRole parse_role(std::string_view name);

struct ModelEndpoint {
    std::string base_url;
    std::string model_name;
    ModelRole role = ModelRole::Scorer;
    double timeout_seconds = 60.0;
    int max_retries = 2;

    void validate() const;
};

/// Network or backend failure; safe to retry.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Misconfiguration detected at call time (e.g. embedding dimension drift).
class GatewayConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Model replied, but not in the expected format.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::string raw)
        : std::runtime_error(what), raw_(std::move(raw)) {}
    const std::string& raw() const { return raw_; }

private:
    std::string raw_;
};

struct ChatRequest {
    ModelRole role = ModelRole::Scorer;
    PromptId prompt_id = PromptId::Score;
    std::string prompt;
    std::vector<ImageBytes> images;
    double temperature = 0.0;
    // JSON schema for constrained decoding, when the caller wants one.
    std::optional<nlohmann::json> response_schema;
};

struct EmbedItem {
    enum class Kind { Text, Image };
    Kind kind = Kind::Text;
    std::string payload;

    static EmbedItem text(std::string s) { return {Kind::Text, std::move(s)}; }
    static EmbedItem image(ImageBytes b) { return {Kind::Image, std::move(b)}; }
};

struct EmbedRequest {
    ModelRole role = ModelRole::ImageEmbedder;
    std::vector<EmbedItem> items;
};

/// Transport behind the gateway. Implementations must be thread-safe.
class ModelBackend {
public:
    virtual ~ModelBackend() = default;
    virtual std::string chat(const ChatRequest& request, const ModelEndpoint& endpoint) = 0;
    virtual std::vector<Embedding> embed(const EmbedRequest& request,
                                         const ModelEndpoint& endpoint) = 0;
};

}  // namespace vad
