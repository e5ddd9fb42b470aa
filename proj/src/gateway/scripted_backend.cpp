#include "vad/gateway/scripted_backend.hpp"

namespace vad {

std::string ScriptedScenario::judge_reply_for(std::string_view label) {
    return nlohmann::json{{"label", label}}.dump();
}

nlohmann::json ScriptedScenario::to_json() const {
    nlohmann::json v = nlohmann::json::array();
    for (const auto& s : verdicts) {
        nlohmann::json e = {{"flag", s.flag}, {"explanation", s.explanation}};
        if (s.raw) e["raw"] = *s.raw;
        v.push_back(std::move(e));
    }
    return {{"verdicts", v},
            {"summaries", summaries},
            {"image_embeddings", image_embeddings},
            {"joint_embeddings", joint_embeddings},
            {"captions", captions},
            {"judge_replies", judge_replies}};
}

ScriptedScenario ScriptedScenario::from_json(const nlohmann::json& j) {
    ScriptedScenario s;
    for (const auto& e : j.value("verdicts", nlohmann::json::array())) {
        ScriptedVerdict v;
        v.flag = e.value("flag", 0);
        v.explanation = e.value("explanation", "");
        if (e.contains("raw")) v.raw = e["raw"].get<std::string>();
        s.verdicts.push_back(std::move(v));
    }
    s.summaries = j.value("summaries", std::vector<std::string>{});
    s.image_embeddings = j.value("image_embeddings", std::vector<Embedding>{});
    s.joint_embeddings = j.value("joint_embeddings", std::vector<std::vector<Embedding>>{});
    s.captions = j.value("captions", std::vector<std::string>{});
    s.judge_replies = j.value("judge_replies", std::vector<std::string>{});
    return s;
}

ScriptedBackend::ScriptedBackend(ScriptedScenario scenario) : scenario_(std::move(scenario)) {}

namespace {

template <typename T>
const T& take(const std::vector<T>& queue, std::size_t& pos, const char* channel) {
    if (pos >= queue.size()) {
        throw TransportError(std::string("scripted scenario exhausted: ") + channel);
    }
    return queue[pos++];
}

}  // namespace

std::string ScriptedBackend::chat(const ChatRequest& request, const ModelEndpoint&) {
    std::lock_guard lock(mu_);
    log_.push_back(request);
    switch (request.prompt_id) {
        case PromptId::Score:
        case PromptId::ScoreWithContext: {
            const auto& v = take(scenario_.verdicts, pos_.score, "verdicts");
            if (v.raw) return *v.raw;
            return "anomaly: " + std::to_string(v.flag) + "\nexplanation: " + v.explanation;
        }
        case PromptId::Summary: return take(scenario_.summaries, pos_.summary, "summaries");
        case PromptId::Caption: return take(scenario_.captions, pos_.caption, "captions");
        case PromptId::Judge: return take(scenario_.judge_replies, pos_.judge, "judge_replies");
    }
    throw TransportError("scripted backend: unsupported prompt");
}

std::vector<Embedding> ScriptedBackend::embed(const EmbedRequest& request, const ModelEndpoint&) {
    std::lock_guard lock(mu_);
    if (request.role == ModelRole::JointEmbedder) {
        const auto& set = take(scenario_.joint_embeddings, pos_.joint_embed, "joint_embeddings");
        if (set.size() != request.items.size()) {
            throw TransportError("scripted joint embedding arity mismatch");
        }
        return set;
    }
    std::vector<Embedding> out;
    for (std::size_t i = 0; i < request.items.size(); ++i) {
        out.push_back(take(scenario_.image_embeddings, pos_.image_embed, "image_embeddings"));
    }
    return out;
}

ScriptedCallCounts ScriptedBackend::counts() const {
    std::lock_guard lock(mu_);
    return pos_;
}

std::vector<ChatRequest> ScriptedBackend::chat_log() const {
    std::lock_guard lock(mu_);
    return log_;
}

}  // namespace vad
