#include "vad/gateway/model_gateway.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "vad/gateway/digest.hpp"
#include "vad/gateway/prompts.hpp"
#include "vad/labels.hpp"

namespace vad {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string strip_leading_punct(std::string s) {
    std::size_t i = 0;
    while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == '-' ||
                            s[i] == ',' || s[i] == '.' || s[i] == ';' || s[i] == ':' ||
                            s[i] == '|')) {
        ++i;
    }
    return s.substr(i);
}

std::string strip_explanation_tag(const std::string& s) {
    static const std::regex tag(R"(^\s*\**\s*(explanation|reason)\s*\**\s*:\s*)",
                                std::regex::icase);
    return std::regex_replace(s, tag, "", std::regex_constants::format_first_only);
}

std::vector<std::string> media_digests(const std::vector<ImageBytes>& images) {
    std::vector<std::string> out;
    out.reserve(images.size());
    for (const auto& img : images) out.push_back("image:" + sha256_hex(img));
    return out;
}

nlohmann::json judge_schema(const std::vector<std::string>& labels) {
    auto options = labels;
    options.emplace_back(kUnknownLabel);
    return {{"type", "object"},
            {"properties", {{"label", {{"type", "string"}, {"enum", options}}}}},
            {"required", {"label"}},
            {"additionalProperties", false}};
}

}  // namespace

ParsedVerdict parse_verdict(const std::string& raw) {
    static const std::regex flag_line(R"(^\s*\**\s*anomaly\s*\**\s*:\s*\**\s*([01])\b(.*)$)",
                                      std::regex::icase);
    std::istringstream in(raw);
    std::string line;
    std::vector<std::string> rest;
    std::optional<int> flag;
    while (std::getline(in, line)) {
        std::smatch m;
        if (!flag && std::regex_match(line, m, flag_line)) {
            flag = m[1].str() == "1" ? 1 : 0;
            auto tail = trim(strip_leading_punct(m[2].str()));
            tail = trim(strip_explanation_tag(tail));
            if (!tail.empty()) rest.push_back(tail);
            continue;
        }
        auto t = trim(strip_explanation_tag(line));
        if (!t.empty()) rest.push_back(t);
    }
    if (!flag) throw ParseError("scorer reply has no 'anomaly: <0|1>' line", raw);
    std::string explanation;
    for (const auto& r : rest) {
        if (!explanation.empty()) explanation += ' ';
        explanation += r;
    }
    if (explanation.empty()) throw ParseError("scorer reply has no explanation", raw);
    return {*flag, explanation};
}

std::optional<std::string> parse_judge_label(const std::string& raw,
                                             const std::vector<std::string>& allowed) {
    auto open = raw.find('{');
    auto close = raw.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        return std::nullopt;
    }
    auto j = nlohmann::json::parse(raw.substr(open, close - open + 1), nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("label") || !j["label"].is_string()) {
        return std::nullopt;
    }
    auto value = j["label"].get<std::string>();
    auto label = normalize_alias(value);
    if (label == kUnknownLabel) {
        // The schema enum allows "unknown" as an explicit answer.
        std::string lowered;
        for (unsigned char c : trim(value)) lowered += static_cast<char>(std::tolower(c));
        if (lowered == kUnknownLabel) return std::string(kUnknownLabel);
        return std::nullopt;
    }
    if (std::find(allowed.begin(), allowed.end(), label) == allowed.end()) return std::nullopt;
    return label;
}

ModelGateway::ModelGateway(std::shared_ptr<ModelBackend> backend,
                           std::vector<ModelEndpoint> endpoints,
                           std::shared_ptr<ResponseCache> cache, GatewayOptions options)
    : backend_(std::move(backend)), cache_(std::move(cache)), options_(options) {
    if (!backend_) throw std::invalid_argument("ModelGateway requires a backend");
    for (auto& ep : endpoints) {
        ep.validate();
        endpoints_[ep.role] = std::move(ep);
    }
}

bool ModelGateway::has_endpoint(ModelRole role) const { return endpoints_.count(role) > 0; }

const ModelEndpoint& ModelGateway::endpoint(ModelRole role) const {
    auto it = endpoints_.find(role);
    if (it == endpoints_.end()) {
        throw GatewayConfigError("no endpoint configured for role '" +
                                 std::string(role_name(role)) + "'");
    }
    return it->second;
}

CallLedger ModelGateway::ledger() const {
    std::lock_guard lock(mu_);
    return ledger_;
}

std::string ModelGateway::call_chat_with_retries(const ChatRequest& request,
                                                 const ModelEndpoint& ep) {
    for (int attempt = 0;; ++attempt) {
        {
            std::lock_guard lock(mu_);
            ++ledger_.backend_calls;
        }
        try {
            return backend_->chat(request, ep);
        } catch (const TransportError&) {
            if (attempt >= ep.max_retries) throw;
        }
    }
}

std::string ModelGateway::chat_cached(const ChatRequest& request,
                                      const std::function<bool(const std::string&)>& accept) {
    const auto& ep = endpoint(request.role);
    std::string key;
    if (cache_) {
        auto digests = media_digests(request.images);
        std::ostringstream t;
        t << "temperature:" << request.temperature;
        digests.push_back(t.str());
        key = make_cache_key(request.role, ep.model_name, request.prompt, digests);
        if (auto hit = cache_->get(request.role, key); hit && accept(*hit)) {
            std::lock_guard lock(mu_);
            ++ledger_.cache_hits;
            return *hit;
        }
    }
    auto reply = call_chat_with_retries(request, ep);
    if (cache_ && accept(reply)) {
        CacheRecord rec;
        rec.key = key;
        rec.model = ep.model_name;
        rec.request_digest =
            sha256_hex(std::string(prompt_name(request.prompt_id)) + '\0' + request.prompt);
        rec.response = reply;
        cache_->put(request.role, std::move(rec));
    }
    return reply;
}

std::vector<Embedding> ModelGateway::embed_cached(const EmbedRequest& request) {
    const auto& ep = endpoint(request.role);
    std::string key;
    if (cache_) {
        std::vector<std::string> digests;
        for (const auto& item : request.items) {
            digests.push_back(item.kind == EmbedItem::Kind::Text ? "text:" + sha256_hex(item.payload)
                                                                 : "image:" + sha256_hex(item.payload));
        }
        key = make_cache_key(request.role, ep.model_name, "", digests);
        if (auto hit = cache_->get(request.role, key)) {
            auto j = nlohmann::json::parse(*hit, nullptr, false);
            if (!j.is_discarded()) {
                std::lock_guard lock(mu_);
                ++ledger_.cache_hits;
                return j.get<std::vector<Embedding>>();
            }
        }
    }
    std::vector<Embedding> out;
    for (int attempt = 0;; ++attempt) {
        {
            std::lock_guard lock(mu_);
            ++ledger_.backend_calls;
        }
        try {
            out = backend_->embed(request, ep);
            break;
        } catch (const TransportError&) {
            if (attempt >= ep.max_retries) throw;
        }
    }
    if (out.size() != request.items.size()) {
        throw GatewayConfigError("embedder returned " + std::to_string(out.size()) +
                                 " vectors for " + std::to_string(request.items.size()) + " items");
    }
    check_dimension(request.role, out);
    if (cache_) {
        CacheRecord rec;
        rec.key = key;
        rec.model = ep.model_name;
        rec.request_digest = key;
        rec.response = nlohmann::json(out).dump();
        cache_->put(request.role, std::move(rec));
    }
    return out;
}

void ModelGateway::check_dimension(ModelRole role, const std::vector<Embedding>& vectors) {
    std::lock_guard lock(mu_);
    for (const auto& v : vectors) {
        if (v.empty()) throw GatewayConfigError("embedder returned an empty vector");
        auto [it, inserted] = dims_.emplace(role, v.size());
        if (!inserted && it->second != v.size()) {
            throw GatewayConfigError("embedding dimension mismatch for role '" +
                                     std::string(role_name(role)) + "': expected " +
                                     std::to_string(it->second) + ", got " +
                                     std::to_string(v.size()));
        }
    }
}

Embedding ModelGateway::embed_image(const ImageBytes& frame) {
    if (frame.empty()) throw PreconditionError("embed_image: cannot decode zero-byte image");
    {
        std::lock_guard lock(mu_);
        ++ledger_.embed_image;
    }
    EmbedRequest req{ModelRole::ImageEmbedder, {EmbedItem::image(frame)}};
    return embed_cached(req).front();
}

std::vector<Embedding> ModelGateway::embed_joint(const std::vector<JointItem>& items) {
    if (items.empty()) throw PreconditionError("embed_joint: empty item list");
    EmbedRequest req{ModelRole::JointEmbedder, {}};
    for (const auto& item : items) {
        if (!item.is_text && item.payload.empty()) {
            throw PreconditionError("embed_joint: cannot decode zero-byte image");
        }
        req.items.push_back(item.is_text ? EmbedItem::text(item.payload)
                                         : EmbedItem::image(item.payload));
    }
    {
        std::lock_guard lock(mu_);
        ++ledger_.embed_joint;
    }
    return embed_cached(req);
}

std::string ModelGateway::render_score_prompt(const std::optional<std::string>& summary) {
    if (summary) {
        return render_prompt(prompt_body(PromptId::ScoreWithContext), {{"summary", *summary}});
    }
    return render_prompt(prompt_body(PromptId::Score), {});
}

std::string ModelGateway::render_caption_prompt(const std::vector<std::string>& evidence) {
    std::string block;
    for (std::size_t i = 0; i < evidence.size(); ++i) {
        if (i) block += '\n';
        block += std::to_string(i + 1) + ". " + evidence[i];
    }
    return render_prompt(prompt_body(PromptId::Caption), {{"evidence", block}});
}

std::string ModelGateway::render_judge_prompt(const std::string& explanation,
                                              const std::vector<std::string>& labels) {
    return render_prompt(prompt_body(PromptId::Judge),
                         {{"labels", nlohmann::json(labels).dump()}, {"explanation", explanation}});
}

ParsedVerdict ModelGateway::score_segment(const std::vector<ImageBytes>& frames,
                                          const std::optional<std::string>& summary) {
    if (frames.size() != options_.frames_per_segment) {
        throw PreconditionError("score_segment: expected " +
                                std::to_string(options_.frames_per_segment) + " frames, got " +
                                std::to_string(frames.size()));
    }
    for (const auto& f : frames) {
        if (f.empty()) throw PreconditionError("score_segment: zero-byte frame");
    }
    {
        std::lock_guard lock(mu_);
        ++ledger_.score;
    }
    ChatRequest req;
    req.role = ModelRole::Scorer;
    req.prompt_id = summary ? PromptId::ScoreWithContext : PromptId::Score;
    req.prompt = render_score_prompt(summary);
    req.images = frames;

    auto parses = [](const std::string& s) {
        try {
            parse_verdict(s);
            return true;
        } catch (const ParseError&) {
            return false;
        }
    };
    auto reply = chat_cached(req, parses);
    try {
        return parse_verdict(reply);
    } catch (const ParseError&) {
    }
    req.prompt += score_format_reminder();
    reply = chat_cached(req, parses);
    return parse_verdict(reply);
}

std::string ModelGateway::summarize(const std::vector<ImageBytes>& key_frames) {
    if (key_frames.empty()) throw PreconditionError("summarize: no key frames");
    for (const auto& f : key_frames) {
        if (f.empty()) throw PreconditionError("summarize: zero-byte frame");
    }
    {
        std::lock_guard lock(mu_);
        ++ledger_.summarize;
    }
    ChatRequest req;
    req.role = ModelRole::Captioner;
    req.prompt_id = PromptId::Summary;
    req.prompt = std::string(prompt_body(PromptId::Summary));
    req.images = key_frames;
    return chat_cached(req, [](const std::string&) { return true; });
}

std::string ModelGateway::caption_event(const std::vector<ImageBytes>& frames,
                                        const std::vector<std::string>& evidence) {
    if (frames.size() != options_.frames_per_segment) {
        throw PreconditionError("caption_event: expected " +
                                std::to_string(options_.frames_per_segment) + " frames");
    }
    if (evidence.empty() || evidence.size() > options_.max_evidence) {
        throw PreconditionError("caption_event: evidence count must be in [1, " +
                                std::to_string(options_.max_evidence) + "]");
    }
    {
        std::lock_guard lock(mu_);
        ++ledger_.caption;
    }
    ChatRequest req;
    req.role = ModelRole::Scorer;
    req.prompt_id = PromptId::Caption;
    req.prompt = render_caption_prompt(evidence);
    req.images = frames;
    return chat_cached(req, [](const std::string& s) { return !trim(s).empty(); });
}

std::string ModelGateway::judge_category(const std::string& explanation,
                                         const std::vector<std::string>& labels) {
    {
        std::lock_guard lock(mu_);
        ++ledger_.judge;
    }
    const ModelEndpoint* ep = nullptr;
    try {
        ep = &endpoint(ModelRole::Judge);
    } catch (const GatewayConfigError&) {
        return std::string(kUnknownLabel);
    }
    ChatRequest req;
    req.role = ModelRole::Judge;
    req.prompt_id = PromptId::Judge;
    req.prompt = render_judge_prompt(explanation, labels);
    req.temperature = 0.0;
    req.response_schema = judge_schema(labels);

    auto valid = [&labels](const std::string& s) { return parse_judge_label(s, labels).has_value(); };
    std::string key;
    if (cache_) {
        key = make_cache_key(ModelRole::Judge, ep->model_name, req.prompt, {"temperature:0"});
        if (auto hit = cache_->get(ModelRole::Judge, key); hit && valid(*hit)) {
            std::lock_guard lock(mu_);
            ++ledger_.cache_hits;
            return *parse_judge_label(*hit, labels);
        }
    }
    // Initial attempt plus up to max_retries retries; each attempt is one backend call.
    for (int attempt = 0; attempt <= ep->max_retries; ++attempt) {
        std::string reply;
        {
            std::lock_guard lock(mu_);
            ++ledger_.backend_calls;
        }
        try {
            reply = backend_->chat(req, *ep);
        } catch (const std::exception&) {
            continue;
        }
        if (auto label = parse_judge_label(reply, labels)) {
            if (cache_) {
                CacheRecord rec;
                rec.key = key;
                rec.model = ep->model_name;
                rec.request_digest = sha256_hex(req.prompt);
                rec.response = reply;
                cache_->put(ModelRole::Judge, std::move(rec));
            }
            return *label;
        }
    }
    return std::string(kUnknownLabel);
}

std::vector<ModelEndpoint> scripted_endpoints() {
    std::vector<ModelEndpoint> eps;
    for (auto role : {ModelRole::Scorer, ModelRole::Captioner, ModelRole::ImageEmbedder,
                      ModelRole::JointEmbedder, ModelRole::Judge}) {
        ModelEndpoint ep;
        ep.base_url = "scripted://local";
        ep.model_name = "scripted-" + std::string(role_name(role));
        ep.role = role;
        ep.timeout_seconds = 1.0;
        ep.max_retries = role == ModelRole::Judge ? 3 : 0;
        eps.push_back(ep);
    }
    return eps;
}

}  // namespace vad
