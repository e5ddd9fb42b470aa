// Command-line front end: run, sweep, synth, report.
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vad/pipeline/runner.hpp"
#include "vad/pipeline/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vad::pipeline;

namespace {

constexpr const char* kApiKeyEnv = "VAD_API_KEY";

std::string api_key_from_env() {
    const char* k = std::getenv(kApiKeyEnv);
    return k ? std::string(k) : std::string();
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << j.dump(2) << "\n";
}

// Writes scenario files, a JSON annotation list and a manifest for each spec.
json synthesize(const fs::path& spec_path, const fs::path& out_dir) {
    std::ifstream in(spec_path);
    if (!in) throw std::runtime_error("cannot open " + spec_path.string());
    json spec = json::parse(in);
    std::vector<json> specs;
    if (spec.contains("videos")) {
        for (const auto& v : spec["videos"]) specs.push_back(v);
    } else {
        specs.push_back(spec);
    }
    fs::create_directories(out_dir / "scenarios");
    json manifest_videos = json::array();
    json annotations = json::array();
    for (const auto& s : specs) {
        auto ss = ScenarioSpec::from_json(s);
        auto gen = generate_scenario(ss);
        const auto scenario_rel = "scenarios/" + ss.video_id + ".json";
        write_json(out_dir / scenario_rel, gen.scenario.to_json());
        json intervals = json::array();
        for (const auto& [a, b] : gen.annotation.anomalous_intervals) intervals.push_back({a, b});
        annotations.push_back({{"video_id", ss.video_id},
                               {"category", gen.annotation.category},
                               {"intervals", intervals},
                               {"total_frames", gen.frame_count}});
        manifest_videos.push_back(
            {{"id", ss.video_id}, {"frame_count", gen.frame_count}, {"scenario", scenario_rel}});
    }
    write_json(out_dir / "annotations.json", annotations);
    json manifest = {{"annotations", "annotations.json"}, {"videos", manifest_videos}};
    write_json(out_dir / "manifest.json", manifest);
    return manifest;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Training-free video anomaly detection pipeline"};
    app.require_subcommand(1);

    std::string config_path, manifest_path, backend, out_dir = "out";
    std::size_t jobs = 1;
    auto* run = app.add_subcommand("run", "Score every video in a manifest");
    run->add_option("--config", config_path, "JSON configuration file");
    run->add_option("--manifest", manifest_path, "Video manifest")->required();
    run->add_option("--backend", backend, "Model backend")->check(CLI::IsMember({"http", "scripted"}));
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--jobs", jobs, "Videos processed in parallel")->check(CLI::PositiveNumber);

    std::string grid_path, sweep_backend, sweep_out = "sweep_out";
    auto* sweep = app.add_subcommand("sweep", "Run a parameter grid");
    sweep->add_option("--grid", grid_path, "Grid definition")->required();
    sweep->add_option("--backend", sweep_backend, "Model backend")
        ->check(CLI::IsMember({"http", "scripted"}));
    sweep->add_option("--out", sweep_out, "Output directory");
    sweep->add_option("--jobs", jobs, "Videos processed in parallel")->check(CLI::PositiveNumber);

    std::string spec_path, synth_out = "synth_out";
    auto* synth = app.add_subcommand("synth", "Generate scripted scenarios");
    synth->add_option("--spec", spec_path, "Scenario spec")->required();
    synth->add_option("--out", synth_out, "Output directory");

    std::string report_in;
    auto* report = app.add_subcommand("report", "Summarize a finished run");
    report->add_option("--in", report_in, "Run output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        DatasetOptions opts;
        opts.jobs = jobs;
        opts.api_key = api_key_from_env();
        if (*run) {
            auto cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
            if (!backend.empty()) cfg.backend = parse_backend(backend);
            cfg.validate();
            auto manifest = load_manifest(manifest_path);
            auto rep = run_dataset(manifest, cfg, out_dir, opts);
            json brief = {{"auc", rep["auc"]},          {"ap", rep["ap"]},
                          {"miou", rep["miou"]},        {"events_per_video", rep["events_per_video"]},
                          {"missing", rep["missing"]},  {"failed", rep["failed"]}};
            std::cout << brief.dump(2) << "\n";
            return rep["completed"].get<std::size_t>() > 0 ? 0 : 1;
        }
        if (*sweep) {
            std::optional<BackendKind> over;
            if (!sweep_backend.empty()) over = parse_backend(sweep_backend);
            auto s = run_sweep(grid_path, sweep_out, opts, over);
            std::cout << s.dump(2) << "\n";
            return 0;
        }
        if (*synth) {
            auto m = synthesize(spec_path, synth_out);
            std::cout << "wrote " << m["videos"].size() << " scenario(s) to " << synth_out << "\n";
            return 0;
        }
        if (*report) {
            std::cout << summarize_run(report_in).dump(2) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
