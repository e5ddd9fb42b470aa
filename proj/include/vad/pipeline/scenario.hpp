#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vad/gateway/scripted_backend.hpp"
#include "vad/metrics.hpp"

namespace vad::pipeline {

struct ScenarioSpec {
    std::string video_id = "Robbery001_x264";
    std::string category = "robbery";
    std::size_t segments = 40;  // h
    std::vector<std::pair<std::size_t, std::size_t>> events;  // inclusive segment ranges
    double cue_density = 0.5;       // P(cue phrase) per event segment
    double negation_density = 0.0;  // P(negation phrase) per normal segment
    double noise_rate = 0.0;        // P(isolated flag=1 spike) per normal segment
    double gate_pass_rate = 1.0;    // P(summary is well grounded) per refresh
    std::size_t segment_len = 16;
    std::size_t frames_per_segment = 8;
    std::size_t embedding_dim = 16;
    std::uint64_t seed = 0;

    static ScenarioSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct GeneratedScenario {
    ScriptedScenario scenario;
    std::vector<int> segment_flags;        // scripted flags, spikes included
    std::vector<int> segment_gold;         // 1 inside declared events only
    metrics::AnnotationRecord annotation;  // frame-level gold
    std::size_t frame_count = 0;
};

// Deterministic for a given spec. Throws PreconditionError for events outside
// [0, h-1] or overlapping events.
GeneratedScenario generate_scenario(const ScenarioSpec& spec);

/// Maximal runs of flag == 1.
std::size_t count_flag_runs(const std::vector<int>& flags);

}  // namespace vad::pipeline
