#include "vad/pipeline/runner.hpp"

#include <chrono>
#include <fstream>
#include <future>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "vad/gateway/http_backend.hpp"
#include "vad/pipeline/scenario.hpp"

namespace vad::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

json optional_metric(const std::function<double()>& f, json& notes, const char* name) {
    try {
        return f();
    } catch (const std::exception& e) {
        notes[name] = e.what();
        return nullptr;
    }
}

}  // namespace

IngestedVideo ingest_video(std::shared_ptr<FrameSource> source,
                           std::optional<metrics::AnnotationRecord> annotation,
                           const PipelineConfig& config) {
    if (!source) throw PreconditionError("ingest_video: no frame source");
    const auto frames = source->frame_count();
    if (frames == 0) throw PreconditionError("video '" + source->video_id() + "' has no frames");
    IngestedVideo v;
    v.id = source->video_id();
    v.segments = make_segments(frames, config.segment_len, config.cea.frames_per_segment);
    if (annotation) {
        if (annotation->total_frames == 0) annotation->total_frames = frames;
        if (annotation->total_frames != frames) {
            throw std::out_of_range("annotation for video '" + v.id + "' declares " +
                                    std::to_string(annotation->total_frames) +
                                    " frames but the video has " + std::to_string(frames));
        }
        annotation->validate();
    }
    v.annotation = std::move(annotation);
    v.source = std::move(source);
    return v;
}

VideoRun run_video(const IngestedVideo& video, const PipelineConfig& config, ModelGateway& gateway) {
    VideoRun run;
    run.id = video.id;

    auto t = std::chrono::steady_clock::now();
    run.cea = cea::run_cea(video.segments, *video.source, config.cea, gateway);
    run.stage_ms["cea"] = elapsed_ms(t);
    run.errors = run.cea.errors;
    std::vector<int> flags;
    for (const auto& v : run.cea.verdicts) flags.push_back(v.flag);
    run.raw_flag_runs = count_flag_runs(flags);

    t = std::chrono::steady_clock::now();
    run.rea = rea::run_rea(run.cea.verdicts, config.rea);
    run.stage_ms["rea"] = elapsed_ms(t);

    t = std::chrono::steady_clock::now();
    for (const auto& w : run.rea.intervals) {
        auto reps = explain::select_representatives(run.rea.field, w, config.rea.theta_peak,
                                                    config.rea.theta_mean);
        try {
            auto frames = explain::sample_event_frames(*video.source, video.segments, w,
                                                       config.cea.frames_per_segment);
            run.events.push_back(
                explain::explain_event(w, reps, frames, run.cea.verdicts, gateway));
        } catch (const std::exception& e) {
            explain::EventExplanation ev;
            ev.interval = w;
            ev.narrative = std::string(explain::kUnavailable);
            ev.error = e.what();
            for (std::size_t k = 0; k < reps.segment_indices.size(); ++k) {
                auto idx = reps.segment_indices[k];
                ev.evidence_used.emplace_back(idx, run.cea.verdicts[idx].explanation);
                ev.reasons.emplace_back(explain::reason_name(reps.reasons[k]));
            }
            run.events.push_back(std::move(ev));
        }
        if (run.events.back().error) {
            run.errors.push_back("event [" + std::to_string(w.l) + ", " + std::to_string(w.r) +
                                 "]: " + *run.events.back().error);
        }
    }
    run.stage_ms["explain"] = elapsed_ms(t);

    t = std::chrono::steady_clock::now();
    run.track = metrics::expand_and_smooth(video.id, run.rea.field.scores, video.segments,
                                           video.source->frame_count(), config.eval.sigma_smooth);
    if (video.annotation) run.track.labels = video.annotation->frame_labels();
    if (config.eval.judge && gateway.has_endpoint(ModelRole::Judge) && !run.events.empty()) {
        run.judge = metrics::judge_variants(video.id, run.events, run.cea.verdicts, run.rea.field,
                                            gateway, config.seed);
    }
    run.stage_ms["eval"] = elapsed_ms(t);
    run.calls = gateway.ledger();
    return run;
}

void write_video_artifacts(const VideoRun& run, const fs::path& dir) {
    fs::create_directories(dir);
    std::string cea_lines;
    for (const auto& r : run.cea.trace) cea_lines += cea::to_json(r).dump() + "\n";
    write_file(dir / "cea.jsonl", cea_lines);
    write_file(dir / "rea.json", rea::to_json(run.rea).dump(2) + "\n");
    json events = json::array();
    for (const auto& e : run.events) events.push_back(explain::to_json(e));
    write_file(dir / "events.json", events.dump(2) + "\n");
    json judge = json::array();
    for (const auto& r : run.judge) {
        judge.push_back({{"event", r.event},
                         {"variant", metrics::variant_name(r.variant)},
                         {"predicted", r.predicted},
                         {"gold", r.gold},
                         {"correct", r.correct}});
    }
    write_file(dir / "judge.json", judge.dump(2) + "\n");
}

Manifest load_manifest(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError("manifest is not valid JSON: " + std::string(e.what()));
    }
    const auto base = path.parent_path();
    auto resolve = [&base](const std::string& p) {
        fs::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };

    std::map<std::string, metrics::AnnotationRecord> shared;
    if (j.contains("annotations")) {
        auto ann_path = resolve(j["annotations"].get<std::string>());
        auto text = read_file(ann_path);
        std::vector<metrics::AnnotationRecord> recs =
            ann_path.extension() == ".json" ? metrics::parse_json_annotations(json::parse(text))
                                            : metrics::parse_ucf_annotations(text);
        for (auto& r : recs) shared[r.video_id] = std::move(r);
    }

    Manifest m;
    for (const auto& v : j.at("videos")) {
        ManifestEntry e;
        e.id = v.at("id").get<std::string>();
        if (v.contains("frames_dir")) e.frames_dir = resolve(v["frames_dir"].get<std::string>());
        if (v.contains("frame_count")) e.frame_count = v["frame_count"].get<std::size_t>();
        if (v.contains("scenario")) e.scenario = resolve(v["scenario"].get<std::string>());
        if (v.contains("annotation")) {
            auto a = v["annotation"];
            a["video_id"] = e.id;
            e.annotation = metrics::parse_json_annotations(json::array({a})).front();
        } else if (auto it = shared.find(e.id); it != shared.end()) {
            e.annotation = it->second;
        }
        m.videos.push_back(std::move(e));
    }
    return m;
}

namespace {

struct VideoOutcome {
    std::optional<VideoRun> run;
    std::optional<std::string> missing;
    std::optional<std::string> failure;
};

VideoOutcome process_entry(const ManifestEntry& entry, const PipelineConfig& config,
                           const fs::path& out_dir, std::shared_ptr<ResponseCache> cache,
                           std::shared_ptr<ModelBackend> http) {
    VideoOutcome out;
    std::shared_ptr<FrameSource> source;
    if (entry.frames_dir) {
        if (!fs::is_directory(*entry.frames_dir)) {
            out.missing = entry.id + ": frame directory " + entry.frames_dir->string() + " not found";
            return out;
        }
        source = std::make_shared<DirectoryFrameSource>(entry.id, *entry.frames_dir);
    } else if (entry.frame_count) {
        source = std::make_shared<SyntheticFrameSource>(entry.id, *entry.frame_count);
    } else {
        out.missing = entry.id + ": no frames_dir or frame_count";
        return out;
    }

    std::shared_ptr<ModelBackend> backend = http;
    std::vector<ModelEndpoint> endpoints = config.endpoints;
    if (config.backend == BackendKind::Scripted) {
        if (!entry.scenario || !fs::exists(*entry.scenario)) {
            out.missing = entry.id + ": scripted scenario file not found";
            return out;
        }
        backend = std::make_shared<ScriptedBackend>(
            ScriptedScenario::from_json(json::parse(read_file(*entry.scenario))));
        endpoints = scripted_endpoints();
    }

    try {
        auto video = ingest_video(source, entry.annotation, config);
        GatewayOptions opts;
        opts.frames_per_segment = config.cea.frames_per_segment;
        ModelGateway gateway(backend, endpoints, cache, opts);
        auto run = run_video(video, config, gateway);
        write_video_artifacts(run, out_dir / "videos" / entry.id);
        out.run = std::move(run);
    } catch (const std::exception& e) {
        out.failure = entry.id + ": " + e.what();
    }
    return out;
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

json run_dataset(const Manifest& manifest, const PipelineConfig& config, const fs::path& out_dir,
                 const DatasetOptions& options) {
    fs::create_directories(out_dir);
    std::shared_ptr<ResponseCache> cache;
    if (!config.cache_dir.empty()) cache = std::make_shared<ResponseCache>(config.cache_dir);
    std::shared_ptr<ModelBackend> http;
    if (config.backend == BackendKind::Http) http = std::make_shared<HttpBackend>(options.api_key);

    std::vector<VideoOutcome> outcomes(manifest.videos.size());
    const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < manifest.videos.size(); i = next++) {
            outcomes[i] = process_entry(manifest.videos[i], config, out_dir, cache, http);
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < jobs; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    json report;
    report["config"] = to_json(config);
    json videos = json::array();
    json missing = json::array();
    json failures = json::array();
    json timings = json::object();
    std::vector<metrics::FrameScoreTrack> labeled;
    std::vector<metrics::FrameScoreTrack> all_tracks;
    std::vector<metrics::AnnotationRecord> annotations;
    std::vector<metrics::JudgeResult> judged;
    double intervals_total = 0, frame_events_total = 0, raw_runs_total = 0;
    std::size_t completed = 0;
    std::string csv = "video_id,frame,score,label\n";

    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        auto& o = outcomes[i];
        if (o.missing) missing.push_back(*o.missing);
        if (o.failure) failures.push_back(*o.failure);
        if (!o.run) continue;
        const auto& run = *o.run;
        ++completed;
        const auto frame_events = metrics::count_events(run.track.scores, config.eval.binarize);
        intervals_total += static_cast<double>(run.rea.intervals.size());
        frame_events_total += static_cast<double>(frame_events);
        raw_runs_total += static_cast<double>(run.raw_flag_runs);
        json intervals = json::array();
        for (const auto& w : run.rea.intervals) intervals.push_back(rea::to_json(w));
        videos.push_back({{"id", run.id},
                          {"segments", run.cea.verdicts.size()},
                          {"frames", run.track.scores.size()},
                          {"intervals", intervals},
                          {"raw_flag_runs", run.raw_flag_runs},
                          {"frame_events", frame_events},
                          {"summary_refreshes", run.cea.refresh_attempts},
                          {"errors", run.errors},
                          {"calls",
                           {{"score", run.calls.score},
                            {"summarize", run.calls.summarize},
                            {"caption", run.calls.caption},
                            {"judge", run.calls.judge},
                            {"embed_image", run.calls.embed_image},
                            {"embed_joint", run.calls.embed_joint},
                            {"backend", run.calls.backend_calls},
                            {"cache_hits", run.calls.cache_hits}}}});
        timings[run.id] = run.stage_ms;
        for (std::size_t f = 0; f < run.track.scores.size(); ++f) {
            csv += run.id + "," + std::to_string(f) + "," + format_double(run.track.scores[f]) + ",";
            if (run.track.labels) csv += std::to_string((*run.track.labels)[f]);
            csv += "\n";
        }
        all_tracks.push_back(run.track);
        if (run.track.labels) {
            labeled.push_back(run.track);
            auto ann = manifest.videos[i].annotation;
            ann->total_frames = run.track.scores.size();
            annotations.push_back(*ann);
        }
        judged.insert(judged.end(), run.judge.begin(), run.judge.end());
    }

    json notes = json::object();
    report["videos"] = videos;
    report["completed"] = completed;
    report["auc"] = optional_metric([&] { return metrics::roc_auc(labeled); }, notes, "auc");
    report["ap"] = optional_metric([&] { return metrics::average_precision(labeled); }, notes, "ap");
    report["miou"] = optional_metric(
        [&] { return metrics::mean_iou(labeled, annotations, config.eval.binarize); }, notes, "miou");
    const double denom = completed ? static_cast<double>(completed) : 1.0;
    report["events_per_video"] = completed ? json(intervals_total / denom) : json(nullptr);
    report["frame_events_per_video"] = completed ? json(frame_events_total / denom) : json(nullptr);
    report["raw_flag_runs_per_video"] = completed ? json(raw_runs_total / denom) : json(nullptr);
    report["judge_accuracy_by_variant"] = metrics::accuracy_by_variant(judged);
    report["judged_explanations"] = judged.size();
    report["missing"] = missing;
    report["failed"] = failures;
    report["metric_notes"] = notes;

    write_file(out_dir / "report.json", report.dump(2) + "\n");
    write_file(out_dir / "frame_scores.csv", csv);
    write_file(out_dir / "config.json", to_json(config).dump(2) + "\n");
    write_file(out_dir / "timings.json", timings.dump(2) + "\n");
    return report;
}

json run_sweep(const fs::path& grid_path, const fs::path& out_dir, const DatasetOptions& options,
               std::optional<BackendKind> backend_override) {
    auto grid = json::parse(read_file(grid_path));
    const auto base = grid_path.parent_path();
    auto resolve = [&base](const std::string& p) {
        fs::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };
    auto manifest = load_manifest(resolve(grid.at("manifest").get<std::string>()));
    json base_cfg = grid.contains("config")
                        ? to_json(load_config(resolve(grid["config"].get<std::string>())))
                        : to_json(PipelineConfig{});
    if (backend_override) base_cfg["backend"] = backend_name(*backend_override);

    std::vector<std::string> keys;
    std::vector<std::vector<json>> values;
    for (const auto& [k, v] : grid.at("params").items()) {
        if (!v.is_array() || v.empty()) throw ConfigError("sweep param '" + k + "' needs a non-empty list");
        keys.push_back(k);
        values.push_back(v.get<std::vector<json>>());
    }

    std::string csv;
    for (const auto& k : keys) csv += k + ",";
    csv += "auc,ap,miou,events_per_video\n";
    json cells = json::array();
    std::vector<std::size_t> idx(keys.size(), 0);
    for (std::size_t cell = 0;; ++cell) {
        json cfg_json = base_cfg;
        json params = json::object();
        for (std::size_t k = 0; k < keys.size(); ++k) {
            apply_override(cfg_json, keys[k], values[k][idx[k]]);
            params[keys[k]] = values[k][idx[k]];
        }
        auto cfg = config_from_json(cfg_json);
        std::ostringstream name;
        name << "cell_" << std::setw(3) << std::setfill('0') << cell;
        auto report = run_dataset(manifest, cfg, out_dir / name.str(), options);
        for (std::size_t k = 0; k < keys.size(); ++k) csv += values[k][idx[k]].dump() + ",";
        auto field = [&report](const char* key) {
            return report[key].is_null() ? std::string() : format_double(report[key].get<double>());
        };
        csv += field("auc") + "," + field("ap") + "," + field("miou") + "," +
               field("events_per_video") + "\n";
        cells.push_back({{"cell", name.str()}, {"params", params}, {"auc", report["auc"]},
                         {"ap", report["ap"]}, {"miou", report["miou"]}});

        std::size_t k = keys.size();
        while (k > 0) {
            --k;
            if (++idx[k] < values[k].size()) break;
            idx[k] = 0;
            if (k == 0) {
                k = keys.size() + 1;
                break;
            }
        }
        if (keys.empty() || k == keys.size() + 1) break;
    }
    write_file(out_dir / "grid.csv", csv);
    json summary = {{"cells", cells}};
    write_file(out_dir / "sweep.json", summary.dump(2) + "\n");
    return summary;
}

json summarize_run(const fs::path& run_dir) {
    std::ifstream in(run_dir / "frame_scores.csv");
    if (!in) throw std::runtime_error("no frame_scores.csv in " + run_dir.string());
    std::string line;
    std::getline(in, line);
    std::map<std::string, std::pair<std::vector<double>, std::vector<int>>> per_video;
    std::vector<std::string> order;
    bool all_labeled = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string id, frame, score, label;
        std::getline(ls, id, ',');
        std::getline(ls, frame, ',');
        std::getline(ls, score, ',');
        std::getline(ls, label, ',');
        if (!per_video.count(id)) order.push_back(id);
        auto& [s, l] = per_video[id];
        s.push_back(std::stod(score));
        if (label.empty()) {
            all_labeled = false;
        } else {
            l.push_back(std::stoi(label));
        }
    }
    json out;
    std::vector<metrics::FrameScoreTrack> tracks;
    for (const auto& id : order) {
        auto& [s, l] = per_video[id];
        metrics::FrameScoreTrack t{id, s, std::nullopt};
        if (l.size() == s.size()) t.labels = l;
        tracks.push_back(std::move(t));
    }
    std::vector<metrics::FrameScoreTrack> labeled;
    for (const auto& t : tracks) {
        if (t.labels) labeled.push_back(t);
    }
    json notes = json::object();
    out["videos"] = tracks.size();
    out["all_labeled"] = all_labeled;
    out["auc"] = optional_metric([&] { return metrics::roc_auc(labeled); }, notes, "auc");
    out["ap"] = optional_metric([&] { return metrics::average_precision(labeled); }, notes, "ap");
    out["metric_notes"] = notes;
    if (fs::exists(run_dir / "report.json")) {
        auto report = json::parse(read_file(run_dir / "report.json"));
        for (const char* k : {"miou", "events_per_video", "judge_accuracy_by_variant", "missing",
                              "failed"}) {
            if (report.contains(k)) out[k] = report[k];
        }
    }
    return out;
}

}  // namespace vad::pipeline
