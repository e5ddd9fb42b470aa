#pragma once

#include <string>

#include "vad/gateway/backend.hpp"

namespace vad {

// OpenAI-compatible transport:
//   POST {base_url}/v1/chat/completions  messages with base64 data-URL images
//   POST {base_url}/v1/embeddings        input items {"type":"text"|"image", ...}
// A bearer token is sent when `api_key` is non-empty.
class HttpBackend : public ModelBackend {
public:
    explicit HttpBackend(std::string api_key = {});

    std::string chat(const ChatRequest& request, const ModelEndpoint& endpoint) override;
    std::vector<Embedding> embed(const EmbedRequest& request,
                                 const ModelEndpoint& endpoint) override;

    static nlohmann::json build_chat_body(const ChatRequest& request,
                                          const ModelEndpoint& endpoint);
    static nlohmann::json build_embed_body(const EmbedRequest& request,
                                           const ModelEndpoint& endpoint);

private:
    nlohmann::json post(const ModelEndpoint& endpoint, const std::string& path,
                        const nlohmann::json& body);

    std::string api_key_;
};

std::string image_data_url(const ImageBytes& bytes);

}  // namespace vad
