#include "vad/gateway/http_backend.hpp"

#include <httplib.h>

#include "vad/gateway/digest.hpp"

namespace vad {

namespace {

std::string sniff_mime(const ImageBytes& b) {
    if (b.size() >= 8 && b.compare(0, 8, "\x89PNG\r\n\x1a\n") == 0) return "image/png";
    if (b.size() >= 3 && static_cast<unsigned char>(b[0]) == 0xFF &&
        static_cast<unsigned char>(b[1]) == 0xD8)
        return "image/jpeg";
    if (b.size() >= 12 && b.compare(0, 4, "RIFF") == 0 && b.compare(8, 4, "WEBP") == 0)
        return "image/webp";
    return "image/jpeg";
}

// "http://host:8000/api" -> {"http://host:8000", "/api"}
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme = url.find("://");
    auto start = scheme == std::string::npos ? 0 : scheme + 3;
    auto slash = url.find('/', start);
    if (slash == std::string::npos) return {url, ""};
    std::string path = url.substr(slash);
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {url.substr(0, slash), path};
}

}  // namespace

std::string image_data_url(const ImageBytes& bytes) {
    return "data:" + sniff_mime(bytes) + ";base64," + base64_encode(bytes);
}

HttpBackend::HttpBackend(std::string api_key) : api_key_(std::move(api_key)) {}

nlohmann::json HttpBackend::build_chat_body(const ChatRequest& request,
                                            const ModelEndpoint& endpoint) {
    nlohmann::json content = nlohmann::json::array();
    content.push_back({{"type", "text"}, {"text", request.prompt}});
    for (const auto& img : request.images) {
        content.push_back({{"type", "image_url"}, {"image_url", {{"url", image_data_url(img)}}}});
    }
    nlohmann::json body = {
        {"model", endpoint.model_name},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", content}}})},
        {"temperature", request.temperature},
        {"stream", false},
    };
    if (request.response_schema) {
        body["response_format"] = {
            {"type", "json_schema"},
            {"json_schema", {{"name", "response"}, {"strict", true}, {"schema", *request.response_schema}}}};
    }
    return body;
}

nlohmann::json HttpBackend::build_embed_body(const EmbedRequest& request,
                                             const ModelEndpoint& endpoint) {
    nlohmann::json input = nlohmann::json::array();
    for (const auto& item : request.items) {
        if (item.kind == EmbedItem::Kind::Text) {
            input.push_back({{"type", "text"}, {"text", item.payload}});
        } else {
            input.push_back({{"type", "image"}, {"image", image_data_url(item.payload)}});
        }
    }
    return {{"model", endpoint.model_name}, {"input", input}};
}

nlohmann::json HttpBackend::post(const ModelEndpoint& endpoint, const std::string& path,
                                 const nlohmann::json& body) {
    auto [host, prefix] = split_url(endpoint.base_url);
    httplib::Client client(host);
    auto secs = static_cast<time_t>(endpoint.timeout_seconds);
    auto usecs = static_cast<time_t>((endpoint.timeout_seconds - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto res = client.Post(prefix + path, headers, body.dump(), "application/json");
    if (!res) {
        throw TransportError("POST " + endpoint.base_url + path + " failed: " +
                             httplib::to_string(res.error()));
    }
    if (res->status >= 500 || res->status == 429 || res->status == 408) {
        throw TransportError("POST " + path + " returned HTTP " + std::to_string(res->status));
    }
    if (res->status != 200) {
        throw GatewayConfigError("POST " + path + " returned HTTP " + std::to_string(res->status) +
                                 ": " + res->body);
    }
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded()) throw TransportError("malformed JSON body from " + path);
    return j;
}

std::string HttpBackend::chat(const ChatRequest& request, const ModelEndpoint& endpoint) {
    auto j = post(endpoint, "/v1/chat/completions", build_chat_body(request, endpoint));
    try {
        const auto& content = j.at("choices").at(0).at("message").at("content");
        if (content.is_null()) return {};
        return content.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("unexpected chat response shape: ") + e.what());
    }
}

std::vector<Embedding> HttpBackend::embed(const EmbedRequest& request,
                                          const ModelEndpoint& endpoint) {
    auto j = post(endpoint, "/v1/embeddings", build_embed_body(request, endpoint));
    try {
        std::vector<Embedding> out(request.items.size());
        const auto& data = j.at("data");
        if (data.size() != request.items.size()) {
            throw TransportError("embedding count mismatch");
        }
        for (std::size_t i = 0; i < data.size(); ++i) {
            auto idx = data[i].value("index", i);
            if (idx >= out.size()) throw TransportError("embedding index out of range");
            out[idx] = data[i].at("embedding").get<Embedding>();
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("unexpected embedding response shape: ") + e.what());
    }
}

}  // namespace vad
