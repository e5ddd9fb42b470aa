#include "vad/pipeline/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace vad::pipeline {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) {
            throw ConfigError("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
        }
    }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config field '" + (where.empty() ? std::string(key) : where + "." + key) +
                          "' has the wrong type");
    }
}

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ConfigError("config field '" + field + "' " + what);
}

}  // namespace

std::string_view backend_name(BackendKind k) {
    return k == BackendKind::Http ? "http" : "scripted";
}

BackendKind parse_backend(std::string_view name) {
    if (name == "http") return BackendKind::Http;
    if (name == "scripted") return BackendKind::Scripted;
    throw ConfigError("config field 'backend' must be 'http' or 'scripted'");
}

void PipelineConfig::validate() const {
    require(segment_len >= 1, "segment_len", "must be >= 1");
    require(cea.frames_per_segment >= 1, "cea.frames_per_segment", "must be >= 1");
    require(cea.history_capacity >= 1, "cea.history_capacity", "must be >= 1");
    require(cea.key_frames >= 1, "cea.key_frames", "must be >= 1");
    require(cea.summary_stride >= 1, "cea.summary_stride", "must be >= 1");
    require(cea.temperature > 0.0, "cea.temperature", "must be > 0");
    require(cea.top_k >= 1, "cea.top_k", "must be >= 1");
    require(cea.delta_sim >= 0.0 && cea.delta_sim <= 1.0, "cea.delta_sim", "must be in [0, 1]");
    require(cea.delta_ent >= 0.0 && cea.delta_ent <= 1.0, "cea.delta_ent", "must be in [0, 1]");
    require(rea.min_length >= 1, "rea.min_length", "must be >= 1");
    require(rea.max_intervals >= 1, "rea.max_intervals", "must be >= 1");
    require(std::isfinite(rea.alpha) && std::isfinite(rea.gamma) && std::isfinite(rea.delta),
            "rea.alpha/gamma/delta", "must be finite");
    require(eval.binarize >= 0.0 && eval.binarize <= 1.0, "eval.binarize", "must be in [0, 1]");
    require(std::isfinite(eval.sigma_smooth), "eval.sigma_smooth", "must be finite");
    for (const auto& ep : endpoints) {
        try {
            ep.validate();
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("config field 'endpoints': ") + e.what());
        }
    }
    if (backend == BackendKind::Http) {
        for (auto role : {ModelRole::Scorer, ModelRole::Captioner, ModelRole::ImageEmbedder,
                          ModelRole::JointEmbedder}) {
            bool found = false;
            for (const auto& ep : endpoints) found = found || ep.role == role;
            require(found, "endpoints",
                    "needs a '" + std::string(role_name(role)) + "' endpoint for the http backend");
        }
    }
}

PipelineConfig config_from_json(const json& j) {
    PipelineConfig c;
    if (j.is_null()) return c;
    reject_unknown(j, {"segment_len", "cea", "rea", "eval", "endpoints", "backend", "cache_dir", "seed"},
                   "");
    read(j, "segment_len", c.segment_len, "");
    read(j, "cache_dir", c.cache_dir, "");
    read(j, "seed", c.seed, "");
    if (j.contains("backend")) {
        if (!j["backend"].is_string()) throw ConfigError("config field 'backend' has the wrong type");
        c.backend = parse_backend(j["backend"].get<std::string>());
    }
    if (j.contains("cea")) {
        const auto& s = j["cea"];
        reject_unknown(s, {"frames_per_segment", "history_capacity", "key_frames", "summary_stride",
                           "min_history", "temperature", "top_k", "delta_sim", "delta_ent"},
                       "cea");
        read(s, "frames_per_segment", c.cea.frames_per_segment, "cea");
        read(s, "history_capacity", c.cea.history_capacity, "cea");
        read(s, "key_frames", c.cea.key_frames, "cea");
        read(s, "summary_stride", c.cea.summary_stride, "cea");
        read(s, "min_history", c.cea.min_history, "cea");
        read(s, "temperature", c.cea.temperature, "cea");
        read(s, "top_k", c.cea.top_k, "cea");
        read(s, "delta_sim", c.cea.delta_sim, "cea");
        read(s, "delta_ent", c.cea.delta_ent, "cea");
    }
    if (j.contains("rea")) {
        const auto& s = j["rea"];
        reject_unknown(s, {"alpha", "gamma", "delta", "theta_peak", "theta_mean", "min_length",
                           "max_depth", "merge_gap", "max_intervals"},
                       "rea");
        read(s, "alpha", c.rea.alpha, "rea");
        read(s, "gamma", c.rea.gamma, "rea");
        read(s, "delta", c.rea.delta, "rea");
        read(s, "theta_peak", c.rea.theta_peak, "rea");
        read(s, "theta_mean", c.rea.theta_mean, "rea");
        read(s, "min_length", c.rea.min_length, "rea");
        read(s, "max_depth", c.rea.max_depth, "rea");
        read(s, "merge_gap", c.rea.merge_gap, "rea");
        read(s, "max_intervals", c.rea.max_intervals, "rea");
    }
    if (j.contains("eval")) {
        const auto& s = j["eval"];
        reject_unknown(s, {"sigma_smooth", "binarize", "judge"}, "eval");
        read(s, "sigma_smooth", c.eval.sigma_smooth, "eval");
        read(s, "binarize", c.eval.binarize, "eval");
        read(s, "judge", c.eval.judge, "eval");
    }
    if (j.contains("endpoints")) {
        if (!j["endpoints"].is_array()) throw ConfigError("config field 'endpoints' must be a list");
        for (const auto& e : j["endpoints"]) {
            reject_unknown(e, {"role", "base_url", "model", "timeout", "max_retries"}, "endpoints[]");
            ModelEndpoint ep;
            std::string role;
            read(e, "role", role, "endpoints[]");
            ep.role = parse_role(role);
            read(e, "base_url", ep.base_url, "endpoints[]");
            read(e, "model", ep.model_name, "endpoints[]");
            read(e, "timeout", ep.timeout_seconds, "endpoints[]");
            read(e, "max_retries", ep.max_retries, "endpoints[]");
            if (ep.role == ModelRole::Judge && !e.contains("max_retries")) ep.max_retries = 3;
            c.endpoints.push_back(ep);
        }
    }
    c.validate();
    return c;
}

PipelineConfig load_config_text(const std::string& text) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return config_from_json(json::object());
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return load_config_text(os.str());
}

json to_json(const PipelineConfig& c) {
    json eps = json::array();
    for (const auto& ep : c.endpoints) {
        eps.push_back({{"role", role_name(ep.role)},
                       {"base_url", ep.base_url},
                       {"model", ep.model_name},
                       {"timeout", ep.timeout_seconds},
                       {"max_retries", ep.max_retries}});
    }
    return {
        {"segment_len", c.segment_len},
        {"cea",
         {{"frames_per_segment", c.cea.frames_per_segment},
          {"history_capacity", c.cea.history_capacity},
          {"key_frames", c.cea.key_frames},
          {"summary_stride", c.cea.summary_stride},
          {"min_history", c.cea.min_history},
          {"temperature", c.cea.temperature},
          {"top_k", c.cea.top_k},
          {"delta_sim", c.cea.delta_sim},
          {"delta_ent", c.cea.delta_ent}}},
        {"rea",
         {{"alpha", c.rea.alpha},
          {"gamma", c.rea.gamma},
          {"delta", c.rea.delta},
          {"theta_peak", c.rea.theta_peak},
          {"theta_mean", c.rea.theta_mean},
          {"min_length", c.rea.min_length},
          {"max_depth", c.rea.max_depth},
          {"merge_gap", c.rea.merge_gap},
          {"max_intervals", c.rea.max_intervals}}},
        {"eval",
         {{"sigma_smooth", c.eval.sigma_smooth},
          {"binarize", c.eval.binarize},
          {"judge", c.eval.judge}}},
        {"endpoints", eps},
        {"backend", backend_name(c.backend)},
        {"cache_dir", c.cache_dir},
        {"seed", c.seed},
    };
}

void apply_override(json& config_json, const std::string& dotted_key, const json& value) {
    json* node = &config_json;
    std::istringstream parts(dotted_key);
    std::string part;
    std::vector<std::string> path;
    while (std::getline(parts, part, '.')) path.push_back(part);
    if (path.empty()) throw ConfigError("empty override key");
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (!node->contains(path[i])) (*node)[path[i]] = json::object();
        node = &(*node)[path[i]];
    }
    (*node)[path.back()] = value;
}

}  // namespace vad::pipeline
