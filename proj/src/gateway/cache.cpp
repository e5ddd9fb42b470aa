#include "vad/gateway/cache.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "vad/gateway/digest.hpp"

namespace vad {

namespace {

std::string utc_now() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

}  // namespace

std::string make_cache_key(ModelRole role, std::string_view model, std::string_view prompt,
                           const std::vector<std::string>& media_digests) {
    std::string material;
    material += role_name(role);
    material += '\0';
    material += model;
    material += '\0';
    material += std::to_string(prompt.size());
    material += ':';
    material += prompt;
    for (const auto& d : media_digests) {
        material += '\0';
        material += d;
    }
    return sha256_hex(material);
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        if (entry.path().extension() != ".jsonl") continue;
        std::ifstream in(entry.path());
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.contains("key") || !j.contains("response")) continue;
            entries_[j.value("role", entry.path().stem().string())][j["key"].get<std::string>()] =
                j["response"].get<std::string>();
        }
    }
}

std::optional<std::string> ResponseCache::get(ModelRole role, const std::string& key) const {
    std::lock_guard lock(mu_);
    auto r = entries_.find(std::string(role_name(role)));
    if (r == entries_.end()) return std::nullopt;
    auto it = r->second.find(key);
    if (it == r->second.end()) return std::nullopt;
    return it->second;
}

void ResponseCache::put(ModelRole role, CacheRecord record) {
    std::lock_guard lock(mu_);
    std::string rname(role_name(role));
    record.role = rname;
    if (record.timestamp.empty()) record.timestamp = utc_now();
    nlohmann::json j = {{"key", record.key},
                        {"role", record.role},
                        {"model", record.model},
                        {"request_digest", record.request_digest},
                        {"response", record.response},
                        {"timestamp", record.timestamp}};
    std::ofstream out(dir_ / (rname + ".jsonl"), std::ios::app);
    out << j.dump() << '\n';
    entries_[rname][record.key] = record.response;
}

std::size_t ResponseCache::size() const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (const auto& [_, m] : entries_) n += m.size();
    return n;
}

}  // namespace vad
