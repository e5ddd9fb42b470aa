#include "vad/rea.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vad::rea {

void ReaConfig::validate() const {
    if (min_length < 1) throw ConfigError("rea.l_min must be >= 1");
    if (max_intervals < 1) throw ConfigError("rea.k_max must be >= 1");
    for (double c : {alpha, gamma, delta, theta_peak, theta_mean}) {
        if (!std::isfinite(c)) throw ConfigError("rea coefficients and thresholds must be finite");
    }
}

double evidence_value(int flag, std::size_t cues, std::size_t negations, double alpha,
                      double gamma, double delta) {
    double raw = alpha * static_cast<double>(flag) + gamma * static_cast<double>(cues) -
                 delta * static_cast<double>(negations);
    raw = std::clamp(raw, 0.0, 1.0);
    // Snap to a 1e-12 grid so decimal coefficient sums land on their nearest double.
    return std::round(raw * 1e12) / 1e12;
}

double evidence_score(const SegmentVerdict& verdict, const Lexicon& lexicon, double alpha,
                      double gamma, double delta) {
    return evidence_value(verdict.flag, lexicon.count_cues(verdict.explanation),
                          lexicon.count_negations(verdict.explanation), alpha, gamma, delta);
}

EvidenceField build_evidence_field(const std::vector<SegmentVerdict>& verdicts,
                                   const Lexicon& lexicon, const ReaConfig& config) {
    EvidenceField field;
    field.alpha = config.alpha;
    field.gamma = config.gamma;
    field.delta = config.delta;
    field.scores.reserve(verdicts.size());
    for (const auto& v : verdicts) {
        field.scores.push_back(evidence_score(v, lexicon, config.alpha, config.gamma, config.delta));
    }
    return field;
}

Window window_stats(const EvidenceField& field, std::size_t l, std::size_t r) {
    if (l > r || r >= field.size()) {
        throw std::out_of_range("window [" + std::to_string(l) + ", " + std::to_string(r) +
                                "] outside field of length " + std::to_string(field.size()));
    }
    Window w{l, r, 0.0, 0.0, 0.0};
    double sum = 0.0;
    double peak = field.scores[l];
    for (std::size_t i = l; i <= r; ++i) {
        sum += field.scores[i];
        peak = std::max(peak, field.scores[i]);
    }
    w.cumulative = sum;
    w.peak = peak;
    w.mean = sum / static_cast<double>(r - l + 1);
    return w;
}

bool likely_anomalous(const Window& window, double theta_peak, double theta_mean) {
    return window.peak >= theta_peak || window.mean >= theta_mean;
}

std::vector<Window> merge_intervals(const EvidenceField& field, std::vector<Window> intervals,
                                    std::size_t gap) {
    if (intervals.empty()) return intervals;
    std::sort(intervals.begin(), intervals.end(), [](const Window& a, const Window& b) {
        return a.l != b.l ? a.l < b.l : a.r < b.r;
    });
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    for (const auto& w : intervals) {
        if (!spans.empty() && w.l <= spans.back().second + gap + 1) {
            spans.back().second = std::max(spans.back().second, w.r);
        } else {
            spans.emplace_back(w.l, w.r);
        }
    }
    std::vector<Window> out;
    out.reserve(spans.size());
    for (auto [l, r] : spans) out.push_back(window_stats(field, l, r));
    return out;
}

std::vector<Window> recurse_localize(const EvidenceField& field, std::size_t l, std::size_t r,
                                     const ReaConfig& config, std::size_t depth,
                                     LocalizeCounter* counter) {
    if (l > r) return {};
    auto w = window_stats(field, l, r);
    if (counter) ++counter->window_evaluations;
    if (!likely_anomalous(w, config.theta_peak, config.theta_mean)) return {};
    if (depth >= config.max_depth || w.length() <= config.min_length) return {w};

    const std::size_t mid = l + (r - l) / 2;
    auto left = recurse_localize(field, l, mid, config, depth + 1, counter);
    auto right = recurse_localize(field, mid + 1, r, config, depth + 1, counter);
    left.insert(left.end(), right.begin(), right.end());
    return merge_intervals(field, std::move(left), 1);
}

std::vector<Window> select_top_k(const std::vector<Window>& candidates,
                                 std::size_t max_intervals) {
    auto ranked = candidates;
    std::stable_sort(ranked.begin(), ranked.end(), [](const Window& a, const Window& b) {
        if (a.cumulative != b.cumulative) return a.cumulative > b.cumulative;
        if (a.l != b.l) return a.l < b.l;
        return a.length() > b.length();
    });
    if (ranked.size() > max_intervals) ranked.resize(max_intervals);
    std::sort(ranked.begin(), ranked.end(),
              [](const Window& a, const Window& b) { return a.l != b.l ? a.l < b.l : a.r < b.r; });
    return ranked;
}

ReaResult run_rea(const std::vector<SegmentVerdict>& verdicts, const ReaConfig& config,
                  const Lexicon& lexicon) {
    if (verdicts.empty()) throw PreconditionError("run_rea: no verdicts");
    config.validate();
    ReaResult res;
    res.field = build_evidence_field(verdicts, lexicon, config);
    LocalizeCounter counter;
    auto windows = recurse_localize(res.field, 0, res.field.size() - 1, config, 0, &counter);
    res.window_evaluations = counter.window_evaluations;
    res.candidates = merge_intervals(res.field, std::move(windows), config.merge_gap);
    res.intervals = select_top_k(res.candidates, config.max_intervals);
    return res;
}

nlohmann::json to_json(const Window& w) {
    return {{"l", w.l}, {"r", w.r}, {"mean", w.mean}, {"peak", w.peak}, {"cumulative", w.cumulative}};
}

nlohmann::json to_json(const ReaResult& result) {
    nlohmann::json intervals = nlohmann::json::array();
    for (const auto& w : result.intervals) intervals.push_back(to_json(w));
    return {{"evidence", result.field.scores}, {"intervals", intervals}};
}

}  // namespace vad::rea
