#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "vad/gateway/backend.hpp"

namespace vad {

struct CacheRecord {
    std::string key;
    std::string role;
    std::string model;
    std::string request_digest;
    std::string response;
    std::string timestamp;
};

/// Digest over (role, model, rendered prompt, media digests). Any byte change changes the key.
std::string make_cache_key(ModelRole role, std::string_view model, std::string_view prompt,
                           const std::vector<std::string>& media_digests);

// Append-only JSONL store, one file per role: <dir>/<role>.jsonl.
// Records already on disk are loaded at construction; later records for the
// same key win. Writes are serialized with a mutex.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir);

    std::optional<std::string> get(ModelRole role, const std::string& key) const;
    void put(ModelRole role, CacheRecord record);

    std::size_t size() const;
    const std::filesystem::path& directory() const { return dir_; }

private:
    std::filesystem::path dir_;
    mutable std::mutex mu_;
    std::map<std::string, std::map<std::string, std::string>> entries_;  // role -> key -> response
};

}  // namespace vad
