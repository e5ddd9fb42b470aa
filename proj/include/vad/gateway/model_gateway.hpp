#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "vad/common.hpp"
#include "vad/gateway/backend.hpp"
#include "vad/gateway/cache.hpp"

namespace vad {

/// Raw scorer output before it is attached to a segment.
struct ParsedVerdict {
    int flag = 0;
    std::string explanation;
};

/// Parses `anomaly: <0|1>` (case-insensitive) plus free-text explanation.
/// Throws ParseError carrying the raw text on failure.
ParsedVerdict parse_verdict(const std::string& raw);

/// Extracts and alias-normalizes the "label" field of a judge reply.
/// Returns nullopt for unparseable replies or labels outside `allowed`.
std::optional<std::string> parse_judge_label(const std::string& raw,
                                             const std::vector<std::string>& allowed);

struct JointItem {
    bool is_text = false;
    std::string payload;  // text, or encoded image bytes

    static JointItem text(std::string s) { return {true, std::move(s)}; }
    static JointItem image(ImageBytes b) { return {false, std::move(b)}; }
};

/// Invocation counts per operation (cache hits included) and backend round-trips.
struct CallLedger {
    std::size_t score = 0;
    std::size_t summarize = 0;
    std::size_t caption = 0;
    std::size_t judge = 0;
    std::size_t embed_image = 0;
    std::size_t embed_joint = 0;
    std::size_t backend_calls = 0;
    std::size_t cache_hits = 0;
};

struct GatewayOptions {
    std::size_t frames_per_segment = 8;  // kappa
    std::size_t max_evidence = 10;
};

// Uniform entry point for every model role. Renders prompts, consults the
// response cache, retries transport failures per endpoint, and parses replies.
// Safe for concurrent use if the backend is.
class ModelGateway {
public:
    ModelGateway(std::shared_ptr<ModelBackend> backend, std::vector<ModelEndpoint> endpoints,
                 std::shared_ptr<ResponseCache> cache = nullptr, GatewayOptions options = {});

    Embedding embed_image(const ImageBytes& frame);
    std::vector<Embedding> embed_joint(const std::vector<JointItem>& items);

    ParsedVerdict score_segment(const std::vector<ImageBytes>& frames,
                                const std::optional<std::string>& summary);
    std::string summarize(const std::vector<ImageBytes>& key_frames);
    std::string caption_event(const std::vector<ImageBytes>& frames,
                              const std::vector<std::string>& evidence);
    // Never throws on model misbehavior; degrades to "unknown".
    std::string judge_category(const std::string& explanation,
                               const std::vector<std::string>& labels);

    static std::string render_score_prompt(const std::optional<std::string>& summary);
    static std::string render_caption_prompt(const std::vector<std::string>& evidence);
    static std::string render_judge_prompt(const std::string& explanation,
                                           const std::vector<std::string>& labels);

    CallLedger ledger() const;
    const GatewayOptions& options() const { return options_; }
    bool has_endpoint(ModelRole role) const;

private:
    const ModelEndpoint& endpoint(ModelRole role) const;
    std::string chat_cached(const ChatRequest& request,
                            const std::function<bool(const std::string&)>& accept);
    std::vector<Embedding> embed_cached(const EmbedRequest& request);
    std::string call_chat_with_retries(const ChatRequest& request, const ModelEndpoint& ep);
    void check_dimension(ModelRole role, const std::vector<Embedding>& vectors);

    std::shared_ptr<ModelBackend> backend_;
    std::map<ModelRole, ModelEndpoint> endpoints_;
    std::shared_ptr<ResponseCache> cache_;
    GatewayOptions options_;

    mutable std::mutex mu_;
    CallLedger ledger_;
    std::map<ModelRole, std::size_t> dims_;
};

/// Endpoints pointing at the scripted backend, one per role.
std::vector<ModelEndpoint> scripted_endpoints();

}  // namespace vad
