#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vad {

using Embedding = std::vector<double>;

// Raw encoded image (JPEG/PNG/...) as read from disk or produced synthetically.
using ImageBytes = std::string;

/// Per-segment output of the scorer model.
struct SegmentVerdict {
    std::size_t segment_index = 0;
    int flag = 0;
    std::string explanation;
    bool used_summary = false;
    std::optional<std::string> summary_snapshot;
};

/// Inclusive segment window with statistics over the evidence field.
struct Window {
    std::size_t l = 0;
    std::size_t r = 0;
    double mean = 0.0;
    double peak = 0.0;
    double cumulative = 0.0;

    std::size_t length() const { return r - l + 1; }
    bool operator==(const Window& o) const { return l == o.l && r == o.r; }
};

// Error taxonomy shared across modules.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vad
