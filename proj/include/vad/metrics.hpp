#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vad/common.hpp"
#include "vad/explainer.hpp"
#include "vad/gateway/model_gateway.hpp"
#include "vad/labels.hpp"
#include "vad/rea.hpp"
#include "vad/video.hpp"

namespace vad::metrics {

class UndefinedMetricError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct FrameScoreTrack {
    std::string video_id;
    std::vector<double> scores;
    std::optional<std::vector<int>> labels;
};

struct AnnotationRecord {
    std::string video_id;
    std::string category;
    std::vector<std::pair<std::size_t, std::size_t>> anomalous_intervals;  // inclusive frames
    std::size_t total_frames = 0;

    void validate() const;
    std::vector<int> frame_labels() const;
};

/// Per-frame step function of segment scores, then truncated Gaussian smoothing (sigma in frames).
FrameScoreTrack expand_and_smooth(const std::string& video_id, const std::vector<double>& field,
                                  const std::vector<Segment>& segments, std::size_t total_frames,
                                  double sigma);

std::vector<double> gaussian_smooth(const std::vector<double>& values, double sigma);

/// Pooled frame-level ROC AUC with midrank tie correction.
double roc_auc(const std::vector<FrameScoreTrack>& tracks);
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

/// Pooled AP: mean of precision@k over positive ranks, descending score, stable ties.
double average_precision(const std::vector<FrameScoreTrack>& tracks);
double average_precision(const std::vector<double>& scores, const std::vector<int>& labels);

double mean_iou(const std::vector<FrameScoreTrack>& tracks,
                const std::vector<AnnotationRecord>& annotations, double threshold);

/// Number of maximal runs with score >= threshold.
std::size_t count_events(const std::vector<double>& scores, double threshold);

struct GoldCategory {
    std::optional<std::string> label;
    std::string skip_reason;
};

GoldCategory infer_gold_category(const std::string& video_name);

enum class Variant { EventLevel, PeakSegment, RandomSegment, Concatenated };
std::string_view variant_name(Variant v);
inline constexpr Variant kAllVariants[] = {Variant::EventLevel, Variant::PeakSegment,
                                           Variant::RandomSegment, Variant::Concatenated};

struct JudgeResult {
    std::string video_id;
    std::size_t event = 0;
    Variant variant = Variant::EventLevel;
    std::string explanation;
    std::string predicted;
    std::string gold;
    bool correct = false;
};

/// Builds the four explanation variants per event and judges each independently.
std::vector<JudgeResult> judge_variants(const std::string& video_id,
                                        const std::vector<explain::EventExplanation>& events,
                                        const std::vector<SegmentVerdict>& verdicts,
                                        const rea::EvidenceField& field, ModelGateway& gateway,
                                        std::uint64_t rng_seed);

/// variant name -> accuracy over all judged results of that variant.
nlohmann::json accuracy_by_variant(const std::vector<JudgeResult>& results);

// Annotation ingestion.
// Text form, one video per line: `<name> <class> <s1> <e1> <s2> <e2>` (-1 = absent).
std::vector<AnnotationRecord> parse_ucf_annotations(const std::string& text);
// JSON form: [{"video_id", "category", "intervals": [[s,e],...], "total_frames"}]
// or {"video_id", "category", "frame_labels": [0,1,...]}.
std::vector<AnnotationRecord> parse_json_annotations(const nlohmann::json& j);

}  // namespace vad::metrics
