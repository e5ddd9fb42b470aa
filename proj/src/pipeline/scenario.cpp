#include "vad/pipeline/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "vad/labels.hpp"
#include "vad/lexicon.hpp"

namespace vad::pipeline {

namespace {

constexpr const char* kEventPhrases[] = {
    "A person moves quickly toward another person near the counter.",
    "Two people struggle and one falls to the ground.",
    "A man grabs an item and moves toward the exit.",
    "Several people gather around a vehicle in the road.",
};

constexpr const char* kNormalPhrases[] = {
    "People walk along the sidewalk at a steady pace.",
    "A car waits at the intersection while pedestrians cross.",
    "A clerk stands behind the counter and talks to a customer.",
    "The parking lot is quiet with a few parked vehicles.",
};

constexpr const char* kNegationPhrases[] = {
    "There is no anomaly.",
    "No unusual movement is visible.",
    "No visible damage to the property.",
};

template <typename T, std::size_t N>
const T& choose(const T (&arr)[N], std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> d(0, N - 1);
    return arr[d(rng)];
}

bool coin(double p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(rng) < p;
}

Embedding basis_mix(std::size_t dim, double cosine, std::size_t axis) {
    Embedding v(dim, 0.0);
    v[0] = cosine;
    v[1 + axis % (dim - 1)] = std::sqrt(std::max(0.0, 1.0 - cosine * cosine));
    return v;
}

}  // namespace

ScenarioSpec ScenarioSpec::from_json(const nlohmann::json& j) {
    ScenarioSpec s;
    s.video_id = j.value("video_id", s.video_id);
    s.category = j.value("category", s.category);
    s.segments = j.value("h", s.segments);
    if (j.contains("events")) {
        for (const auto& e : j["events"]) {
            s.events.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
        }
    }
    s.cue_density = j.value("cue_density", s.cue_density);
    s.negation_density = j.value("negation_density", s.negation_density);
    s.noise_rate = j.value("noise_rate", s.noise_rate);
    s.gate_pass_rate = j.value("gate_pass_rate", s.gate_pass_rate);
    s.segment_len = j.value("segment_len", s.segment_len);
    s.frames_per_segment = j.value("frames_per_segment", s.frames_per_segment);
    s.embedding_dim = j.value("embedding_dim", s.embedding_dim);
    s.seed = j.value("seed", s.seed);
    return s;
}

nlohmann::json ScenarioSpec::to_json() const {
    nlohmann::json ev = nlohmann::json::array();
    for (auto [l, r] : events) ev.push_back({l, r});
    return {{"video_id", video_id},         {"category", category},
            {"h", segments},                {"events", ev},
            {"cue_density", cue_density},   {"negation_density", negation_density},
            {"noise_rate", noise_rate},     {"gate_pass_rate", gate_pass_rate},
            {"segment_len", segment_len},   {"frames_per_segment", frames_per_segment},
            {"embedding_dim", embedding_dim}, {"seed", seed}};
}

std::size_t count_flag_runs(const std::vector<int>& flags) {
    std::size_t runs = 0;
    bool inside = false;
    for (int f : flags) {
        if (f && !inside) ++runs;
        inside = f != 0;
    }
    return runs;
}

GeneratedScenario generate_scenario(const ScenarioSpec& spec) {
    const std::size_t h = spec.segments;
    if (h == 0) throw PreconditionError("scenario needs at least one segment");
    if (spec.embedding_dim < 2) throw PreconditionError("embedding_dim must be >= 2");
    auto events = spec.events;
    std::sort(events.begin(), events.end());
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].first > events[i].second || events[i].second >= h) {
            throw PreconditionError("scenario event outside [0, h-1]");
        }
        if (i > 0 && events[i].first <= events[i - 1].second) {
            throw PreconditionError("scenario events overlap");
        }
    }

    std::mt19937_64 rng(spec.seed);
    GeneratedScenario out;
    out.segment_flags.assign(h, 0);
    out.segment_gold.assign(h, 0);
    for (auto [l, r] : events) {
        for (std::size_t i = l; i <= r; ++i) out.segment_gold[i] = 1;
    }

    const auto& cues = rea::Lexicon::standard().cue_keywords();
    std::uniform_int_distribution<std::size_t> cue_pick(0, cues.size() - 1);
    for (std::size_t i = 0; i < h; ++i) {
        ScriptedVerdict v;
        if (out.segment_gold[i]) {
            v.flag = 1;
            v.explanation = choose(kEventPhrases, rng);
            if (coin(spec.cue_density, rng)) {
                v.explanation += " The scene suggests " + cues[cue_pick(rng)] + ".";
            }
        } else if (coin(spec.noise_rate, rng)) {
            v.flag = 1;
            v.explanation = std::string(choose(kNormalPhrases, rng)) +
                            " A sudden motion near the frame edge is ambiguous.";
        } else {
            v.flag = 0;
            v.explanation = choose(kNormalPhrases, rng);
            if (coin(spec.negation_density, rng)) {
                v.explanation += std::string(" ") + choose(kNegationPhrases, rng);
            }
        }
        out.segment_flags[i] = v.flag;
        out.scenario.verdicts.push_back(std::move(v));
    }

    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < h; ++i) {
        Embedding e(spec.embedding_dim);
        for (auto& x : e) x = gauss(rng);
        e[0] += 0.5;  // keep clear of the zero vector
        out.scenario.image_embeddings.push_back(std::move(e));
    }

    const std::size_t kappa = spec.frames_per_segment;
    for (std::size_t r = 0; r < h; ++r) {
        out.scenario.summaries.push_back("- A street scene with pedestrians and parked cars.\n"
                                         "- Refresh " + std::to_string(r + 1) +
                                         ": people remain near the storefront.");
        const bool grounded = coin(spec.gate_pass_rate, rng);
        std::vector<Embedding> set;
        set.push_back(basis_mix(spec.embedding_dim, 1.0, 0));
        std::uniform_int_distribution<std::size_t> hot_pick(0, kappa - 1);
        const std::size_t hot = hot_pick(rng);
        for (std::size_t k = 0; k < kappa; ++k) {
            double cosine = 0.1;
            if (grounded && k == hot) cosine = 0.9;
            if (grounded && kappa > 1 && k == (hot + 1) % kappa) cosine = 0.8;
            set.push_back(basis_mix(spec.embedding_dim, cosine, k + 1));
        }
        out.scenario.joint_embeddings.push_back(std::move(set));
    }

    for (std::size_t c = 0; c < std::max<std::size_t>(16, events.size()); ++c) {
        out.scenario.captions.push_back(
            "A person confronts another person and takes an item before leaving. Event " +
            std::to_string(c + 1) + " ends when the scene calms down.");
    }

    // Judge replies in variant order (event, peak, random, concatenated) per event.
    const auto& labels = canonical_labels();
    std::string decoy = labels.front() == spec.category ? labels.back() : labels.front();
    for (std::size_t e = 0; e < 64; ++e) {
        out.scenario.judge_replies.push_back(ScriptedScenario::judge_reply_for(spec.category));
        out.scenario.judge_replies.push_back(ScriptedScenario::judge_reply_for(decoy));
        out.scenario.judge_replies.push_back(ScriptedScenario::judge_reply_for(decoy));
        out.scenario.judge_replies.push_back(ScriptedScenario::judge_reply_for(spec.category));
    }

    out.frame_count = h * spec.segment_len;
    out.annotation.video_id = spec.video_id;
    out.annotation.category = spec.category;
    out.annotation.total_frames = out.frame_count;
    for (auto [l, r] : events) {
        out.annotation.anomalous_intervals.emplace_back(l * spec.segment_len,
                                                        (r + 1) * spec.segment_len - 1);
    }
    return out;
}

}  // namespace vad::pipeline
