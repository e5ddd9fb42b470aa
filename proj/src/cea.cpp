#include "vad/cea.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vad/gateway/digest.hpp"

namespace vad::cea {

Embedding l2_normalize(const Embedding& v) {
    double sq = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) throw NormalizationError("embedding has non-finite component");
        sq += x * x;
    }
    if (v.empty() || sq == 0.0) throw NormalizationError("cannot normalize a zero vector");
    const double norm = std::sqrt(sq);
    Embedding out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / norm;
    return out;
}

HistoryBuffer::HistoryBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("history capacity must be positive");
}

void HistoryBuffer::push(std::size_t segment_index, std::size_t center_frame,
                         const Embedding& raw) {
    if (!entries_.empty() && segment_index <= entries_.back().segment_index) {
        throw std::invalid_argument("history entries must arrive in increasing segment order");
    }
    entries_.push_back({segment_index, l2_normalize(raw), center_frame});
    while (entries_.size() > capacity_) entries_.pop_front();
}

HistoryBuffer push_history(HistoryBuffer buffer, const Segment& segment, const Embedding& raw) {
    buffer.push(segment.index, segment.center_frame, raw);
    return buffer;
}

namespace {

double distance(const Embedding& a, const Embedding& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

std::vector<std::size_t> farthest_point_indices(const std::vector<Embedding>& points,
                                                std::size_t k) {
    const std::size_t n = points.size();
    if (n == 0) throw PreconditionError("farthest_point_indices: no points");
    if (k == 0) throw PreconditionError("farthest_point_indices: K must be positive");
    const std::size_t want = std::min(k, n);

    std::vector<bool> chosen(n, false);
    std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> order{n - 1};
    chosen[n - 1] = true;
    while (order.size() < want) {
        const auto& last = points[order.back()];
        std::size_t best = n;
        double best_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (chosen[i]) continue;
            min_dist[i] = std::min(min_dist[i], distance(points[i], last));
            if (min_dist[i] > best_d) {
                best_d = min_dist[i];
                best = i;
            }
        }
        chosen[best] = true;
        order.push_back(best);
    }
    return order;
}

std::vector<HistoryEntry> select_key_frames(const HistoryBuffer& buffer, std::size_t k) {
    if (buffer.size() == 0) throw PreconditionError("select_key_frames: empty history");
    std::vector<Embedding> points;
    for (const auto& e : buffer.entries()) points.push_back(e.embedding);
    auto order = farthest_point_indices(points, k);
    std::sort(order.begin(), order.end());
    std::vector<HistoryEntry> out;
    for (auto i : order) out.push_back(buffer.entries()[i]);
    return out;
}

GateStats grounding_stats(const std::vector<double>& similarities, double temperature,
                          std::size_t top_k) {
    if (similarities.empty()) throw PreconditionError("grounding_stats: no similarities");
    if (!(temperature > 0.0)) throw PreconditionError("grounding_stats: temperature must be > 0");
    if (top_k == 0) throw PreconditionError("grounding_stats: top_k must be positive");

    GateStats st;
    st.similarities = similarities;
    st.temperature = temperature;
    st.top_k = std::min(top_k, similarities.size());

    auto sorted = similarities;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double sum = 0.0;
    for (std::size_t i = 0; i < st.top_k; ++i) sum += sorted[i];
    st.mu = sum / static_cast<double>(st.top_k);

    const std::size_t kappa = similarities.size();
    if (kappa == 1) {
        st.entropy = 0.0;
        return st;
    }
    const double peak = sorted.front() / temperature;
    std::vector<double> w(kappa);
    double z = 0.0;
    for (std::size_t i = 0; i < kappa; ++i) {
        w[i] = std::exp(similarities[i] / temperature - peak);
        z += w[i];
    }
    double h = 0.0;
    for (double wi : w) {
        double p = wi / z;
        if (p > 0.0) h -= p * std::log(p);
    }
    st.entropy = std::clamp(h / std::log(static_cast<double>(kappa)), 0.0, 1.0);
    return st;
}

GateStats compute_grounding(const std::string& summary, const std::vector<ImageBytes>& frames,
                            ModelGateway& gateway, double temperature, std::size_t top_k) {
    if (summary.empty()) throw PreconditionError("compute_grounding: empty summary");
    if (frames.empty()) throw PreconditionError("compute_grounding: no frames");
    std::vector<JointItem> items;
    items.push_back(JointItem::text(summary));
    for (const auto& f : frames) items.push_back(JointItem::image(f));
    auto vecs = gateway.embed_joint(items);
    const auto text = l2_normalize(vecs.front());
    std::vector<double> alphas;
    for (std::size_t k = 1; k < vecs.size(); ++k) {
        auto u = l2_normalize(vecs[k]);
        if (u.size() != text.size()) {
            throw GatewayConfigError("joint embedder returned mixed dimensions");
        }
        double dot = 0.0;
        for (std::size_t d = 0; d < u.size(); ++d) dot += u[d] * text[d];
        alphas.push_back(std::clamp(dot, -1.0, 1.0));
    }
    return grounding_stats(alphas, temperature, top_k);
}

bool gate_decision(const GateStats& stats, double delta_sim, double delta_ent) {
    return stats.mu > delta_sim && stats.entropy < delta_ent;
}

RefreshOutcome maybe_refresh_summary(const SummaryState& state, const HistoryBuffer& buffer,
                                     std::size_t segment_count, std::size_t segment_index,
                                     const std::vector<ImageBytes>& segment_frames,
                                     const FrameSource& source, const CeaConfig& config,
                                     ModelGateway& gateway) {
    RefreshOutcome out{state, false, std::nullopt};
    if (config.summary_stride == 0 || buffer.size() < config.min_history ||
        segment_count % config.summary_stride != 0) {
        return out;
    }
    out.attempted = true;
    try {
        auto keys = select_key_frames(buffer, config.key_frames);
        std::vector<ImageBytes> key_images;
        for (const auto& e : keys) key_images.push_back(source.read(e.center_frame));
        auto summary = gateway.summarize(key_images);
        auto stats = compute_grounding(summary, segment_frames, gateway, config.temperature,
                                       config.top_k);
        out.state.text = summary;
        out.state.stats = stats;
        out.state.accepted = gate_decision(stats, config.delta_sim, config.delta_ent);
        out.state.last_refresh_segment = segment_index;
    } catch (const std::exception& e) {
        out.state = state;
        out.state.accepted = false;
        out.error = e.what();
    }
    return out;
}

nlohmann::json to_json(const TraceRecord& r) {
    nlohmann::json j = {{"index", r.index},
                        {"flag", r.flag},
                        {"explanation", r.explanation},
                        {"used_summary", r.used_summary}};
    j["mu"] = r.mu ? nlohmann::json(*r.mu) : nlohmann::json(nullptr);
    j["entropy"] = r.entropy ? nlohmann::json(*r.entropy) : nlohmann::json(nullptr);
    j["summary_digest"] =
        r.summary_digest ? nlohmann::json(*r.summary_digest) : nlohmann::json(nullptr);
    j["refresh_attempted"] = r.refresh_attempted;
    j["refresh_accepted"] = r.refresh_accepted;
    return j;
}

TraceRecord trace_record_from_json(const nlohmann::json& j) {
    TraceRecord r;
    r.index = j.at("index").get<std::size_t>();
    r.flag = j.at("flag").get<int>();
    r.explanation = j.at("explanation").get<std::string>();
    r.used_summary = j.value("used_summary", false);
    if (j.contains("mu") && !j["mu"].is_null()) r.mu = j["mu"].get<double>();
    if (j.contains("entropy") && !j["entropy"].is_null()) r.entropy = j["entropy"].get<double>();
    if (j.contains("summary_digest") && !j["summary_digest"].is_null()) {
        r.summary_digest = j["summary_digest"].get<std::string>();
    }
    r.refresh_attempted = j.value("refresh_attempted", false);
    r.refresh_accepted = j.value("refresh_accepted", false);
    return r;
}

CeaResult run_cea(const std::vector<Segment>& segments, const FrameSource& source,
                  const CeaConfig& config, ModelGateway& gateway) {
    if (segments.empty()) throw PreconditionError("run_cea: no segments");
    CeaResult result;
    HistoryBuffer history(config.history_capacity);
    SummaryState state;

    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& seg = segments[i];
        const std::size_t c = i + 1;
        TraceRecord rec;
        rec.index = seg.index;

        std::vector<ImageBytes> frames;
        try {
            frames = load_frames(source, seg.frames);
        } catch (const std::exception& e) {
            result.errors.push_back("segment " + std::to_string(seg.index) + ": " + e.what());
        }

        if (!frames.empty()) {
            auto refresh = maybe_refresh_summary(state, history, c, seg.index, frames, source,
                                                 config, gateway);
            if (refresh.attempted) {
                result.refresh_attempts.push_back(c);
                rec.refresh_attempted = true;
                rec.refresh_accepted = refresh.state.accepted;
                if (refresh.error) {
                    result.errors.push_back("segment " + std::to_string(seg.index) +
                                            " summary refresh: " + *refresh.error);
                }
            }
            state = std::move(refresh.state);
        }

        SegmentVerdict v;
        v.segment_index = seg.index;
        if (state.accepted) {
            v.used_summary = true;
            v.summary_snapshot = state.text;
        }
        if (state.stats) {
            rec.mu = state.stats->mu;
            rec.entropy = state.stats->entropy;
        }
        try {
            if (frames.empty()) throw std::runtime_error("segment frames unavailable");
            auto parsed = gateway.score_segment(frames, v.summary_snapshot);
            v.flag = parsed.flag;
            v.explanation = parsed.explanation;
        } catch (const std::exception& e) {
            v.flag = 0;
            v.explanation = "<error>";
            result.errors.push_back("segment " + std::to_string(seg.index) + " scoring: " +
                                    e.what());
        }
        rec.flag = v.flag;
        rec.explanation = v.explanation;
        rec.used_summary = v.used_summary;
        if (v.summary_snapshot) rec.summary_digest = sha256_hex(*v.summary_snapshot);

        try {
            history.push(seg.index, seg.center_frame, gateway.embed_image(source.read(seg.center_frame)));
        } catch (const std::exception& e) {
            result.errors.push_back("segment " + std::to_string(seg.index) + " history: " +
                                    e.what());
        }

        result.verdicts.push_back(std::move(v));
        result.trace.push_back(std::move(rec));
    }
    return result;
}

}  // namespace vad::cea
