#include "vad/explainer.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace vad::explain {

std::string_view reason_name(Reason r) {
    switch (r) {
        case Reason::Boundary: return "boundary";
        case Reason::Peak: return "peak";
        case Reason::Transition: return "transition";
    }
    return "?";
}

RepresentativeSet select_representatives(const rea::EvidenceField& field, const Window& interval,
                                         double theta_peak, double theta_mean, std::size_t cap) {
    if (interval.l > interval.r || interval.r >= field.size()) {
        throw std::out_of_range("select_representatives: interval outside evidence field");
    }
    const auto& y = field.scores;
    std::vector<std::pair<std::size_t, Reason>> ordered;
    ordered.emplace_back(interval.l, Reason::Boundary);
    ordered.emplace_back(interval.r, Reason::Boundary);

    std::vector<std::size_t> by_score;
    for (std::size_t i = interval.l; i <= interval.r; ++i) by_score.push_back(i);
    std::stable_sort(by_score.begin(), by_score.end(),
                     [&y](std::size_t a, std::size_t b) { return y[a] > y[b]; });

    for (auto i : by_score) {
        if (y[i] >= theta_peak) ordered.emplace_back(i, Reason::Peak);
    }
    for (std::size_t i = interval.l + 1; i <= interval.r; ++i) {
        if ((y[i - 1] >= theta_mean) != (y[i] >= theta_mean)) {
            ordered.emplace_back(i, Reason::Transition);
        }
    }
    for (auto i : by_score) ordered.emplace_back(i, Reason::Peak);

    std::map<std::size_t, Reason> picked;
    for (const auto& [idx, reason] : ordered) {
        if (picked.size() >= cap) break;
        picked.emplace(idx, reason);
    }
    RepresentativeSet out;
    out.interval = interval;
    for (const auto& [idx, reason] : picked) {
        out.segment_indices.push_back(idx);
        out.reasons.push_back(reason);
    }
    return out;
}

std::vector<std::size_t> event_frame_indices(std::size_t first_frame, std::size_t last_frame,
                                             std::size_t kappa) {
    if (kappa == 0) throw PreconditionError("kappa must be positive");
    if (last_frame < first_frame) throw PreconditionError("interval maps to no frames");
    if (kappa == 1) return {first_frame};
    return uniform_frame_indices(first_frame, last_frame, kappa);
}

FrameSample sample_event_frames(const FrameSource& source, const std::vector<Segment>& segments,
                                const Window& interval, std::size_t kappa) {
    if (interval.r >= segments.size() || interval.l > interval.r) {
        throw PreconditionError("sample_event_frames: interval outside segment range");
    }
    FrameSample out;
    out.frames = event_frame_indices(segments[interval.l].first_frame,
                                     segments[interval.r].last_frame, kappa);
    const std::size_t total = source.frame_count();
    for (auto& f : out.frames) {
        try {
            out.images.push_back(source.read(f));
            continue;
        } catch (const std::exception&) {
        }
        bool found = false;
        for (std::size_t d = 1; d < total && !found; ++d) {
            for (long cand : {static_cast<long>(f) - static_cast<long>(d),
                              static_cast<long>(f) + static_cast<long>(d)}) {
                if (cand < 0 || static_cast<std::size_t>(cand) >= total) continue;
                try {
                    out.images.push_back(source.read(static_cast<std::size_t>(cand)));
                    out.substitutions.emplace_back(f, static_cast<std::size_t>(cand));
                    f = static_cast<std::size_t>(cand);
                    found = true;
                    break;
                } catch (const std::exception&) {
                }
            }
        }
        if (!found) throw std::runtime_error("no readable frame near " + std::to_string(f));
    }
    return out;
}

std::size_t count_sentences(std::string_view text) {
    std::size_t n = 0;
    bool in_sentence = false;
    for (char c : text) {
        if (c == '.' || c == '!' || c == '?') {
            if (in_sentence) ++n;
            in_sentence = false;
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            in_sentence = true;
        }
    }
    return n + (in_sentence ? 1 : 0);
}

EventExplanation explain_event(const Window& interval, const RepresentativeSet& reps,
                               const FrameSample& frames,
                               const std::vector<SegmentVerdict>& verdicts,
                               ModelGateway& gateway) {
    if (reps.segment_indices.empty()) throw PreconditionError("explain_event: no representatives");
    EventExplanation ev;
    ev.interval = interval;
    ev.frames_used = frames.frames;
    std::vector<std::string> evidence;
    for (std::size_t k = 0; k < reps.segment_indices.size(); ++k) {
        auto idx = reps.segment_indices[k];
        if (idx < interval.l || idx > interval.r || idx >= verdicts.size()) {
            throw std::out_of_range("representative segment outside interval or verdicts");
        }
        ev.evidence_used.emplace_back(idx, verdicts[idx].explanation);
        ev.reasons.emplace_back(reason_name(reps.reasons[k]));
        evidence.push_back(verdicts[idx].explanation);
    }
    try {
        ev.narrative = gateway.caption_event(frames.images, evidence);
        if (ev.narrative.find_first_not_of(" \t\r\n") == std::string::npos) {
            throw std::runtime_error("empty narrative");
        }
    } catch (const std::exception& e) {
        ev.narrative = std::string(kUnavailable);
        ev.error = e.what();
    }
    ev.sentence_count = count_sentences(ev.narrative);
    return ev;
}

nlohmann::json to_json(const EventExplanation& e) {
    nlohmann::json evidence = nlohmann::json::array();
    for (const auto& [idx, text] : e.evidence_used) {
        evidence.push_back({{"segment", idx}, {"explanation", text}});
    }
    nlohmann::json j = {{"interval", rea::to_json(e.interval)},
                        {"narrative", e.narrative},
                        {"evidence_used", evidence},
                        {"frames_used", e.frames_used},
                        {"reasons", e.reasons},
                        {"sentence_count", e.sentence_count}};
    if (e.error) j["error"] = *e.error;
    return j;
}

}  // namespace vad::explain
