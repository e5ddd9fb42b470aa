#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vad/common.hpp"
#include "vad/gateway/model_gateway.hpp"
#include "vad/rea.hpp"
#include "vad/video.hpp"

namespace vad::explain {

inline constexpr std::size_t kMaxRepresentatives = 10;
inline constexpr std::string_view kUnavailable = "<unavailable>";

enum class Reason { Boundary, Peak, Transition };
std::string_view reason_name(Reason r);

struct RepresentativeSet {
    Window interval;
    std::vector<std::size_t> segment_indices;  // ascending
    std::vector<Reason> reasons;               // parallel to segment_indices
};

// Candidates in priority order: boundaries l and r; strong peaks (score >=
// theta_peak, descending, ties to earlier index); transitions (index i where
// scores[i-1] and scores[i] lie on different sides of theta_mean); then a
// top-by-score fill. Truncated to `cap`, deduplicated, returned ascending.
RepresentativeSet select_representatives(const rea::EvidenceField& field, const Window& interval,
                                         double theta_peak, double theta_mean,
                                         std::size_t cap = kMaxRepresentatives);

struct FrameSample {
    std::vector<std::size_t> frames;
    std::vector<std::pair<std::size_t, std::size_t>> substitutions;  // requested -> used
    std::vector<ImageBytes> images;
};

/// kappa frame indices spaced uniformly (inclusive, rounded) over [first_frame, last_frame].
std::vector<std::size_t> event_frame_indices(std::size_t first_frame, std::size_t last_frame,
                                             std::size_t kappa);

// Loads the uniformly spaced frames of an interval; an unreadable frame is
// replaced with the nearest readable one (lower index on ties).
FrameSample sample_event_frames(const FrameSource& source, const std::vector<Segment>& segments,
                                const Window& interval, std::size_t kappa);

struct EventExplanation {
    Window interval;
    std::string narrative;
    std::vector<std::pair<std::size_t, std::string>> evidence_used;
    std::vector<std::size_t> frames_used;
    std::vector<std::string> reasons;
    std::size_t sentence_count = 0;
    std::optional<std::string> error;
};

std::size_t count_sentences(std::string_view text);

EventExplanation explain_event(const Window& interval, const RepresentativeSet& reps,
                               const FrameSample& frames,
                               const std::vector<SegmentVerdict>& verdicts, ModelGateway& gateway);

nlohmann::json to_json(const EventExplanation& e);

}  // namespace vad::explain
