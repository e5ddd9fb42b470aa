#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "vad/common.hpp"
#include "vad/lexicon.hpp"

namespace vad::rea {

struct ReaConfig {
    double alpha = 0.90;
    double gamma = 0.05;
    double delta = 0.25;
    double theta_peak = 0.8;
    double theta_mean = 0.5;
    std::size_t min_length = 2;  // l_min
    std::size_t max_depth = 8;   // d_max
    std::size_t merge_gap = 1;
    std::size_t max_intervals = 6;  // K_max

    void validate() const;
};

struct EvidenceField {
    std::vector<double> scores;
    double alpha = 0.90;
    double gamma = 0.05;
    double delta = 0.25;

    std::size_t size() const { return scores.size(); }
};

/// clip(alpha*flag + gamma*cues - delta*negations, 0, 1), quantized to 1e-12.
double evidence_value(int flag, std::size_t cues, std::size_t negations, double alpha,
                      double gamma, double delta);

double evidence_score(const SegmentVerdict& verdict, const Lexicon& lexicon, double alpha,
                      double gamma, double delta);

EvidenceField build_evidence_field(const std::vector<SegmentVerdict>& verdicts,
                                   const Lexicon& lexicon, const ReaConfig& config);

/// Mean, peak and sum over [l, r]; throws std::out_of_range for bad bounds.
Window window_stats(const EvidenceField& field, std::size_t l, std::size_t r);

bool likely_anomalous(const Window& window, double theta_peak, double theta_mean);

/// Counts window-stat evaluations made during localization.
struct LocalizeCounter {
    std::size_t window_evaluations = 0;
};

std::vector<Window> merge_intervals(const EvidenceField& field, std::vector<Window> intervals,
                                    std::size_t gap);

std::vector<Window> recurse_localize(const EvidenceField& field, std::size_t l, std::size_t r,
                                     const ReaConfig& config, std::size_t depth,
                                     LocalizeCounter* counter = nullptr);

/// Top max_intervals by cumulative evidence (ties: earlier l, then longer), returned sorted by l.
std::vector<Window> select_top_k(const std::vector<Window>& candidates, std::size_t max_intervals);

struct ReaResult {
    EvidenceField field;
    std::vector<Window> candidates;  // merged, before top-K
    std::vector<Window> intervals;   // selected
    std::size_t window_evaluations = 0;
};

ReaResult run_rea(const std::vector<SegmentVerdict>& verdicts, const ReaConfig& config,
                  const Lexicon& lexicon = Lexicon::standard());

nlohmann::json to_json(const Window& w);
nlohmann::json to_json(const ReaResult& result);

}  // namespace vad::rea
