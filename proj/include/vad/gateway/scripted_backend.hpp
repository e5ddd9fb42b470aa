#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vad/gateway/backend.hpp"

namespace vad {

struct ScriptedVerdict {
    int flag = 0;
    std::string explanation;
    // Replied verbatim instead of the formatted (flag, explanation) when set.
    std::optional<std::string> raw;
};

/// Canned model outputs for one video, replayed in call order per channel.
struct ScriptedScenario {
    std::vector<ScriptedVerdict> verdicts;
    std::vector<std::string> summaries;
    std::vector<Embedding> image_embeddings;
    std::vector<std::vector<Embedding>> joint_embeddings;
    std::vector<std::string> captions;
    std::vector<std::string> judge_replies;

    static std::string judge_reply_for(std::string_view label);

    nlohmann::json to_json() const;
    static ScriptedScenario from_json(const nlohmann::json& j);
};

struct ScriptedCallCounts {
    std::size_t score = 0;
    std::size_t summary = 0;
    std::size_t caption = 0;
    std::size_t judge = 0;
    std::size_t image_embed = 0;
    std::size_t joint_embed = 0;
};

// Position-stateful replay: the n-th scoring request receives verdict n, the
// n-th summary request summary n, and so on. Instantiate one per video.
// An exhausted channel raises TransportError.
class ScriptedBackend : public ModelBackend {
public:
    explicit ScriptedBackend(ScriptedScenario scenario);

    std::string chat(const ChatRequest& request, const ModelEndpoint& endpoint) override;
    std::vector<Embedding> embed(const EmbedRequest& request,
                                 const ModelEndpoint& endpoint) override;

    ScriptedCallCounts counts() const;
    /// Every prompt seen, in order, for inspection in tests.
    std::vector<ChatRequest> chat_log() const;

private:
    ScriptedScenario scenario_;
    mutable std::mutex mu_;
    ScriptedCallCounts pos_;
    std::vector<ChatRequest> log_;
};

}  // namespace vad
