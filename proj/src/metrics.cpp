#include "vad/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace vad::metrics {

void AnnotationRecord::validate() const {
    std::size_t prev_end = 0;
    bool first = true;
    for (const auto& [s, e] : anomalous_intervals) {
        if (s > e || (total_frames > 0 && e >= total_frames)) {
            throw std::out_of_range("annotation for video '" + video_id + "': interval [" +
                                    std::to_string(s) + ", " + std::to_string(e) +
                                    "] outside [0, " + std::to_string(total_frames) + ")");
        }
        if (!first && s <= prev_end) {
            throw std::invalid_argument("annotation for video '" + video_id +
                                        "': intervals overlap or are unsorted");
        }
        prev_end = e;
        first = false;
    }
}

std::vector<int> AnnotationRecord::frame_labels() const {
    std::vector<int> labels(total_frames, 0);
    for (const auto& [s, e] : anomalous_intervals) {
        for (std::size_t f = s; f <= e && f < total_frames; ++f) labels[f] = 1;
    }
    return labels;
}

std::vector<double> gaussian_smooth(const std::vector<double>& values, double sigma) {
    if (!(sigma > 0.0) || values.empty()) return values;
    const auto radius = static_cast<long>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    for (long d = -radius; d <= radius; ++d) {
        kernel[static_cast<std::size_t>(d + radius)] =
            std::exp(-static_cast<double>(d * d) / (2.0 * sigma * sigma));
    }
    const long n = static_cast<long>(values.size());
    std::vector<double> out(values.size());
    for (long i = 0; i < n; ++i) {
        double acc = 0.0;
        double wsum = 0.0;
        for (long d = -radius; d <= radius; ++d) {
            long j = i + d;
            if (j < 0 || j >= n) continue;
            double w = kernel[static_cast<std::size_t>(d + radius)];
            acc += w * values[static_cast<std::size_t>(j)];
            wsum += w;
        }
        out[static_cast<std::size_t>(i)] = std::clamp(acc / wsum, 0.0, 1.0);
    }
    return out;
}

FrameScoreTrack expand_and_smooth(const std::string& video_id, const std::vector<double>& field,
                                  const std::vector<Segment>& segments, std::size_t total_frames,
                                  double sigma) {
    if (field.size() != segments.size()) {
        throw std::invalid_argument("expand_and_smooth: field/segment count mismatch");
    }
    std::vector<double> frames(total_frames, 0.0);
    std::size_t expected = 0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& s = segments[i];
        if (s.first_frame != expected || s.last_frame < s.first_frame ||
            s.last_frame >= total_frames) {
            throw PreconditionError("expand_and_smooth: segments do not tile the frame range");
        }
        for (std::size_t f = s.first_frame; f <= s.last_frame; ++f) {
            frames[f] = std::clamp(field[i], 0.0, 1.0);
        }
        expected = s.last_frame + 1;
    }
    if (expected != total_frames) {
        throw PreconditionError("expand_and_smooth: segments do not cover every frame");
    }
    return {video_id, gaussian_smooth(frames, sigma), std::nullopt};
}

namespace {

void pool(const std::vector<FrameScoreTrack>& tracks, std::vector<double>& scores,
          std::vector<int>& labels) {
    for (const auto& t : tracks) {
        if (!t.labels) throw std::invalid_argument("track '" + t.video_id + "' has no labels");
        if (t.labels->size() != t.scores.size()) {
            throw std::invalid_argument("track '" + t.video_id + "' label/score length mismatch");
        }
        scores.insert(scores.end(), t.scores.begin(), t.scores.end());
        labels.insert(labels.end(), t.labels->begin(), t.labels->end());
    }
}

}  // namespace

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("roc_auc: length mismatch");
    const std::size_t n = scores.size();
    std::size_t pos = 0;
    for (int l : labels) pos += l != 0;
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) throw UndefinedMetricError("roc_auc: need both classes");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]]) rank_sum += midrank;
        }
        i = j + 1;
    }
    const double p = static_cast<double>(pos);
    return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

double roc_auc(const std::vector<FrameScoreTrack>& tracks) {
    std::vector<double> s;
    std::vector<int> l;
    pool(tracks, s, l);
    return roc_auc(s, l);
}

double average_precision(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) {
        throw std::invalid_argument("average_precision: length mismatch");
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&scores](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    double sum = 0.0;
    std::size_t tp = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (labels[order[k]]) {
            ++tp;
            sum += static_cast<double>(tp) / static_cast<double>(k + 1);
        }
    }
    if (tp == 0) throw UndefinedMetricError("average_precision: no positive frames");
    return sum / static_cast<double>(tp);
}

double average_precision(const std::vector<FrameScoreTrack>& tracks) {
    std::vector<double> s;
    std::vector<int> l;
    pool(tracks, s, l);
    return average_precision(s, l);
}

double mean_iou(const std::vector<FrameScoreTrack>& tracks,
                const std::vector<AnnotationRecord>& annotations, double threshold) {
    std::map<std::string, const AnnotationRecord*> by_id;
    for (const auto& a : annotations) by_id[a.video_id] = &a;
    double total = 0.0;
    std::size_t videos = 0;
    for (const auto& t : tracks) {
        auto it = by_id.find(t.video_id);
        if (it == by_id.end()) {
            throw std::invalid_argument("mean_iou: no annotation for video '" + t.video_id + "'");
        }
        const auto& ann = *it->second;
        if (ann.anomalous_intervals.empty()) continue;
        auto gt = ann.frame_labels();
        gt.resize(t.scores.size(), 0);
        std::size_t inter = 0, uni = 0;
        for (std::size_t f = 0; f < t.scores.size(); ++f) {
            bool p = t.scores[f] >= threshold;
            bool g = gt[f] != 0;
            inter += p && g;
            uni += p || g;
        }
        total += uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
        ++videos;
    }
    if (videos == 0) throw UndefinedMetricError("mean_iou: no abnormal videos");
    return total / static_cast<double>(videos);
}

std::size_t count_events(const std::vector<double>& scores, double threshold) {
    std::size_t runs = 0;
    bool inside = false;
    for (double s : scores) {
        bool hot = s >= threshold;
        if (hot && !inside) ++runs;
        inside = hot;
    }
    return runs;
}

GoldCategory infer_gold_category(const std::string& video_name) {
    std::string stem = video_name;
    if (auto slash = stem.find_last_of("/\\"); slash != std::string::npos) {
        stem = stem.substr(slash + 1);
    }
    std::string prefix;
    for (unsigned char c : stem) {
        if (std::isdigit(c)) break;
        if (std::isalpha(c)) prefix += static_cast<char>(std::tolower(c));
        // Separators such as '_' or '-' before the first digit are dropped.
    }
    if (prefix.empty()) return {std::nullopt, "no alphabetic prefix in '" + video_name + "'"};
    if (prefix.rfind("normal", 0) == 0) return {std::nullopt, "normal video"};
    auto label = normalize_alias(prefix);
    if (label == kUnknownLabel) {
        return {std::nullopt, "unrecognized category prefix '" + prefix + "'"};
    }
    return {label, {}};
}

std::string_view variant_name(Variant v) {
    switch (v) {
        case Variant::EventLevel: return "event_level";
        case Variant::PeakSegment: return "peak_segment";
        case Variant::RandomSegment: return "random_segment";
        case Variant::Concatenated: return "concatenated";
    }
    return "?";
}

std::vector<JudgeResult> judge_variants(const std::string& video_id,
                                        const std::vector<explain::EventExplanation>& events,
                                        const std::vector<SegmentVerdict>& verdicts,
                                        const rea::EvidenceField& field, ModelGateway& gateway,
                                        std::uint64_t rng_seed) {
    std::vector<JudgeResult> results;
    auto gold = infer_gold_category(video_id);
    if (!gold.label) return results;

    std::mt19937_64 rng(rng_seed);
    for (std::size_t e = 0; e < events.size(); ++e) {
        const auto& w = events[e].interval;
        if (w.r >= verdicts.size() || w.r >= field.size()) {
            throw std::out_of_range("judge_variants: interval outside stored verdicts");
        }
        std::size_t peak = w.l;
        for (std::size_t i = w.l; i <= w.r; ++i) {
            if (field.scores[i] > field.scores[peak]) peak = i;
        }
        std::uniform_int_distribution<std::size_t> pick(w.l, w.r);
        const std::size_t random_idx = pick(rng);
        std::string concat;
        for (std::size_t i = w.l; i <= w.r; ++i) {
            if (!concat.empty()) concat += '\n';
            concat += verdicts[i].explanation;
        }
        const std::pair<Variant, std::string> variants[] = {
            {Variant::EventLevel, events[e].narrative},
            {Variant::PeakSegment, verdicts[peak].explanation},
            {Variant::RandomSegment, verdicts[random_idx].explanation},
            {Variant::Concatenated, concat},
        };
        for (const auto& [variant, text] : variants) {
            JudgeResult r;
            r.video_id = video_id;
            r.event = e;
            r.variant = variant;
            r.explanation = text;
            r.predicted = gateway.judge_category(text, canonical_labels());
            r.gold = *gold.label;
            r.correct = r.predicted == r.gold;
            results.push_back(std::move(r));
        }
    }
    return results;
}

nlohmann::json accuracy_by_variant(const std::vector<JudgeResult>& results) {
    nlohmann::json out = nlohmann::json::object();
    for (auto v : kAllVariants) {
        std::size_t n = 0, hit = 0;
        for (const auto& r : results) {
            if (r.variant != v) continue;
            ++n;
            hit += r.correct;
        }
        out[std::string(variant_name(v))] =
            n == 0 ? nlohmann::json(nullptr)
                   : nlohmann::json(static_cast<double>(hit) / static_cast<double>(n));
    }
    return out;
}

std::vector<AnnotationRecord> parse_ucf_annotations(const std::string& text) {
    std::vector<AnnotationRecord> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string name, category;
        if (!(ls >> name)) continue;
        if (!(ls >> category)) {
            throw std::invalid_argument("annotation line " + std::to_string(lineno) +
                                        ": missing class");
        }
        AnnotationRecord rec;
        auto dot = name.rfind('.');
        rec.video_id = dot == std::string::npos ? name : name.substr(0, dot);
        rec.category = category;
        long s = 0, e = 0;
        while (ls >> s >> e) {
            if (s < 0 || e < 0) continue;
            rec.anomalous_intervals.emplace_back(static_cast<std::size_t>(s),
                                                 static_cast<std::size_t>(e));
        }
        std::sort(rec.anomalous_intervals.begin(), rec.anomalous_intervals.end());
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<AnnotationRecord> parse_json_annotations(const nlohmann::json& j) {
    std::vector<AnnotationRecord> out;
    const auto& arr = j.is_array() ? j : j.at("videos");
    for (const auto& v : arr) {
        AnnotationRecord rec;
        rec.video_id = v.at("video_id").get<std::string>();
        rec.category = v.value("category", "");
        rec.total_frames = v.value("total_frames", std::size_t{0});
        if (v.contains("frame_labels")) {
            auto labels = v["frame_labels"].get<std::vector<int>>();
            rec.total_frames = labels.size();
            for (std::size_t f = 0; f < labels.size(); ++f) {
                if (!labels[f]) continue;
                if (!rec.anomalous_intervals.empty() && rec.anomalous_intervals.back().second + 1 == f) {
                    rec.anomalous_intervals.back().second = f;
                } else {
                    rec.anomalous_intervals.emplace_back(f, f);
                }
            }
        } else {
            for (const auto& iv : v.value("intervals", nlohmann::json::array())) {
                rec.anomalous_intervals.emplace_back(iv.at(0).get<std::size_t>(),
                                                     iv.at(1).get<std::size_t>());
            }
        }
        rec.validate();
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace vad::metrics
