#include "vad/gateway/prompts.hpp"

#include <array>
#include <stdexcept>

namespace vad {

namespace {

constexpr std::array<std::string_view, 4> kPlaceholders = {"summary", "labels", "explanation",
                                                           "evidence"};

constexpr std::string_view kSummary =
    "You are given key frames sampled from the earlier part of a surveillance video.\n"
    "Summarize what has happened so far.\n"
    "\n"
    "Requirements:\n"
    "1. Describe only clearly observable visual content (people, objects, actions, scene).\n"
    "2. Do not speculate about intent, normality, or future events.\n"
    "3. If the evidence is insufficient to tell what is happening, say so explicitly.\n"
    "4. Answer with 2-4 short bullet points.\n"
    "Never label any event as normal or anomalous.\n";

constexpr std::string_view kScore =
    "You are a video anomaly detector. The frames below are uniformly sampled from one short "
    "video segment.\n"
    "Decide whether the segment contains an anomalous event (e.g. violence, crime, accident, "
    "fire).\n"
    "\n"
    "Respond in exactly this format:\n"
    "anomaly: <0 or 1>\n"
    "explanation: <one or two sentences describing the visual evidence for your decision>\n";

constexpr std::string_view kScoreWithContext =
    "You are a video anomaly detector. The frames below are uniformly sampled from one short "
    "video segment.\n"
    "Historical context describing earlier segments of the same video:\n"
    "{summary}\n"
    "\n"
    "Using this context, decide whether the current segment deviates into an anomalous event "
    "(e.g. violence, crime, accident, fire).\n"
    "\n"
    "Respond in exactly this format:\n"
    "anomaly: <0 or 1>\n"
    "explanation: <one or two sentences describing the visual evidence for your decision>\n";

constexpr std::string_view kCaption =
    "The frames below span one detected anomalous event in a video.\n"
    "Segment-level observations recorded during detection, in temporal order:\n"
    "{evidence}\n"
    "\n"
    "Write a concise narrative of at most 4 sentences describing the event. Use only what is "
    "supported by the frames and the observations above; do not add details that are not "
    "present in them.\n";

constexpr std::string_view kJudge =
    "You are a strict evaluator.\n"
    "\n"
    "Task: Given ONLY the text explanation of an event in a video, predict the video anomaly "
    "category.\n"
    "\n"
    "Closed-set labels (choose exactly ONE):\n"
    "{labels}\n"
    "\n"
    "Rules:\n"
    "- Use ONLY the information explicitly stated in the explanation.\n"
    "- Output must be a single JSON object with one key: \"label\".\n"
    "\n"
    "Explanation:\n"
    "{explanation}\n"
    "\n"
    "Return ONLY:\n"
    "{\"label\": \"<one of the labels above>\"}";

constexpr std::string_view kReminder =
    "\nYour previous answer could not be parsed. The first line MUST be exactly "
    "\"anomaly: 0\" or \"anomaly: 1\", followed by \"explanation: ...\".\n";

bool is_placeholder(std::string_view name) {
    for (auto p : kPlaceholders) {
        if (p == name) return true;
    }
    return false;
}

}  // namespace

std::string_view prompt_name(PromptId id) {
    switch (id) {
        case PromptId::Summary: return "P_summary";
        case PromptId::Score: return "P_score";
        case PromptId::ScoreWithContext: return "P_score_ctx";
        case PromptId::Caption: return "P_caption";
        case PromptId::Judge: return "P_judge";
    }
    return "?";
}

std::string_view prompt_body(PromptId id) {
    switch (id) {
        case PromptId::Summary: return kSummary;
        case PromptId::Score: return kScore;
        case PromptId::ScoreWithContext: return kScoreWithContext;
        case PromptId::Caption: return kCaption;
        case PromptId::Judge: return kJudge;
    }
    return {};
}

std::string_view score_format_reminder() { return kReminder; }

std::string render_prompt(std::string_view body, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(body.size() + 256);
    std::size_t i = 0;
    while (i < body.size()) {
        if (body[i] == '{') {
            auto close = body.find('}', i + 1);
            if (close != std::string_view::npos) {
                auto name = body.substr(i + 1, close - i - 1);
                if (is_placeholder(name)) {
                    auto it = values.find(std::string(name));
                    if (it == values.end()) {
                        throw std::invalid_argument("unbound prompt placeholder {" +
                                                    std::string(name) + "}");
                    }
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += body[i++];
    }
    return out;
}

bool has_residual_placeholder(std::string_view text) {
    for (auto p : kPlaceholders) {
        std::string token = "{" + std::string(p) + "}";
        if (text.find(token) != std::string_view::npos) return true;
    }
    return false;
}

}  // namespace vad
