#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vad/common.hpp"
#include "vad/gateway/model_gateway.hpp"
#include "vad/video.hpp"

namespace vad::cea {

inline constexpr std::string_view kNoPriorEvents = "No prior events observed yet";

class NormalizationError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Unit-L2 copy of `v`. Throws NormalizationError for zero or non-finite input.
Embedding l2_normalize(const Embedding& v);

struct HistoryEntry {
    std::size_t segment_index = 0;
    Embedding embedding;  // unit norm
    std::size_t center_frame = 0;
};

// Bounded FIFO of center-frame embeddings, ordered by segment index.
class HistoryBuffer {
public:
    explicit HistoryBuffer(std::size_t capacity);

    void push(std::size_t segment_index, std::size_t center_frame, const Embedding& raw);

    const std::deque<HistoryEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }

private:
    std::size_t capacity_;
    std::deque<HistoryEntry> entries_;
};

HistoryBuffer push_history(HistoryBuffer buffer, const Segment& segment, const Embedding& raw);

// Greedy maximin selection over `points`, seeded with the last point. Returns
// indices in pick order; ties go to the lowest index.
std::vector<std::size_t> farthest_point_indices(const std::vector<Embedding>& points,
                                                std::size_t k);

/// Greedy farthest-point sampling seeded with the most recent entry.
/// Ties go to the lowest segment index; the result is ordered by segment index.
std::vector<HistoryEntry> select_key_frames(const HistoryBuffer& buffer, std::size_t k);

struct GateStats {
    std::vector<double> similarities;
    double mu = 0.0;
    double entropy = 0.0;
    double temperature = 0.1;
    std::size_t top_k = 4;
};

/// mu = mean of the top_k similarities; entropy = normalized Shannon entropy of softmax(a/tau).
GateStats grounding_stats(const std::vector<double>& similarities, double temperature,
                          std::size_t top_k);

GateStats compute_grounding(const std::string& summary, const std::vector<ImageBytes>& frames,
                            ModelGateway& gateway, double temperature, std::size_t top_k);

/// Strict: mu > delta_sim and entropy < delta_ent.
bool gate_decision(const GateStats& stats, double delta_sim, double delta_ent);

struct CeaConfig {
    std::size_t frames_per_segment = 8;  // kappa
    std::size_t history_capacity = 8;    // n
    std::size_t key_frames = 4;          // K
    std::size_t summary_stride = 5;      // S
    std::size_t min_history = 3;         // m_min
    double temperature = 0.1;            // tau
    std::size_t top_k = 4;               // K-tilde
    double delta_sim = 0.30;
    double delta_ent = 0.80;
};

struct SummaryState {
    std::string text{kNoPriorEvents};
    std::optional<std::size_t> last_refresh_segment;
    bool accepted = false;
    std::optional<GateStats> stats;
};

struct RefreshOutcome {
    SummaryState state;
    bool attempted = false;
    std::optional<std::string> error;
};

// Runs summarize + grounding + gate when |buffer| >= m_min and c % S == 0.
// `segment_frames` are the current segment's kappa images used for grounding.
RefreshOutcome maybe_refresh_summary(const SummaryState& state, const HistoryBuffer& buffer,
                                     std::size_t segment_count, std::size_t segment_index,
                                     const std::vector<ImageBytes>& segment_frames,
                                     const FrameSource& source, const CeaConfig& config,
                                     ModelGateway& gateway);

struct TraceRecord {
    std::size_t index = 0;
    int flag = 0;
    std::string explanation;
    bool used_summary = false;
    std::optional<double> mu;
    std::optional<double> entropy;
    std::optional<std::string> summary_digest;
    bool refresh_attempted = false;
    bool refresh_accepted = false;
};

nlohmann::json to_json(const TraceRecord& r);
TraceRecord trace_record_from_json(const nlohmann::json& j);

struct CeaResult {
    std::vector<SegmentVerdict> verdicts;
    std::vector<TraceRecord> trace;
    std::vector<std::size_t> refresh_attempts;  // values of the 1-based counter c
    std::vector<std::string> errors;
};

CeaResult run_cea(const std::vector<Segment>& segments, const FrameSource& source,
                  const CeaConfig& config, ModelGateway& gateway);

}  // namespace vad::cea
