#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "vad/gateway/model_gateway.hpp"
#include "vad/gateway/scripted_backend.hpp"
#include "vad/video.hpp"

namespace vad::testing {

// Scripted gateway plus direct access to its backend for call inspection.
struct ScriptedRig {
    std::shared_ptr<ScriptedBackend> backend;
    std::unique_ptr<ModelGateway> gateway;

    explicit ScriptedRig(ScriptedScenario scenario, std::shared_ptr<ResponseCache> cache = nullptr,
                         GatewayOptions opts = {}) {
        backend = std::make_shared<ScriptedBackend>(std::move(scenario));
        gateway = std::make_unique<ModelGateway>(backend, scripted_endpoints(), cache, opts);
    }
};

inline std::vector<ImageBytes> fake_frames(std::size_t n, const std::string& tag = "f") {
    std::vector<ImageBytes> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(tag + std::to_string(i));
    return out;
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() /
             ("vad_test_" + name + "_" + std::to_string(std::random_device{}()));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace vad::testing
