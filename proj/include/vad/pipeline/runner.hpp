#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vad/cea.hpp"
#include "vad/explainer.hpp"
#include "vad/gateway/model_gateway.hpp"
#include "vad/gateway/scripted_backend.hpp"
#include "vad/metrics.hpp"
#include "vad/pipeline/config.hpp"
#include "vad/rea.hpp"
#include "vad/video.hpp"

namespace vad::pipeline {

struct IngestedVideo {
    std::string id;
    std::shared_ptr<FrameSource> source;
    std::vector<Segment> segments;
    std::optional<metrics::AnnotationRecord> annotation;
};

// Splits into segment_len-frame segments and validates the annotation against
// the frame count (filling total_frames when it was unknown).
IngestedVideo ingest_video(std::shared_ptr<FrameSource> source,
                           std::optional<metrics::AnnotationRecord> annotation,
                           const PipelineConfig& config);

struct VideoRun {
    std::string id;
    cea::CeaResult cea;
    rea::ReaResult rea;
    std::vector<explain::EventExplanation> events;
    metrics::FrameScoreTrack track;
    std::vector<metrics::JudgeResult> judge;
    CallLedger calls;
    std::size_t raw_flag_runs = 0;
    std::vector<std::string> errors;
    std::map<std::string, double> stage_ms;
};

VideoRun run_video(const IngestedVideo& video, const PipelineConfig& config, ModelGateway& gateway);

/// cea.jsonl, rea.json, events.json, judge.json under `dir`.
void write_video_artifacts(const VideoRun& run, const std::filesystem::path& dir);

struct ManifestEntry {
    std::string id;
    std::optional<std::filesystem::path> frames_dir;
    std::optional<std::size_t> frame_count;  // synthetic frames when no directory
    std::optional<std::filesystem::path> scenario;
    std::optional<metrics::AnnotationRecord> annotation;
};

struct Manifest {
    std::vector<ManifestEntry> videos;
};

// JSON manifest: {"annotations": <path, optional>, "videos": [{"id", "frames_dir"|"frame_count",
// "scenario", "annotation"}]}. Relative paths resolve against the manifest's directory.
Manifest load_manifest(const std::filesystem::path& path);

struct DatasetOptions {
    std::size_t jobs = 1;
    std::string api_key;  // bearer token for the http backend
};

/// Runs every video, writes artifacts under `out_dir`, and returns the report JSON.
nlohmann::json run_dataset(const Manifest& manifest, const PipelineConfig& config,
                           const std::filesystem::path& out_dir, const DatasetOptions& options = {});

// Grid file: {"manifest": path, "config": path (optional),
//             "params": {"cea.delta_sim": [..], "cea.delta_ent": [..]}}.
// One report per cell under out_dir/cell_NNN plus out_dir/grid.csv.
nlohmann::json run_sweep(const std::filesystem::path& grid_path, const std::filesystem::path& out_dir,
                         const DatasetOptions& options = {},
                         std::optional<BackendKind> backend_override = std::nullopt);

/// Re-derives pooled metrics from an output directory's frame_scores.csv.
nlohmann::json summarize_run(const std::filesystem::path& run_dir);

}  // namespace vad::pipeline
