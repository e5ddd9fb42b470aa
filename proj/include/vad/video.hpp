#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "vad/common.hpp"

namespace vad {

/// Random access to the decoded-frame images of one video.
class FrameSource {
public:
    virtual ~FrameSource() = default;
    virtual const std::string& video_id() const = 0;
    virtual std::size_t frame_count() const = 0;
    // Throws std::runtime_error if the frame cannot be read.
    virtual ImageBytes read(std::size_t frame) const = 0;
};

/// One image file per frame, ordered by filename.
class DirectoryFrameSource : public FrameSource {
public:
    DirectoryFrameSource(std::string video_id, const std::filesystem::path& dir);

    const std::string& video_id() const override { return id_; }
    std::size_t frame_count() const override { return files_.size(); }
    ImageBytes read(std::size_t frame) const override;

private:
    std::string id_;
    std::vector<std::filesystem::path> files_;
};

// Placeholder frames ("<video>#<index>") for offline runs where every model
// role is scripted and pixel content is never inspected.
class SyntheticFrameSource : public FrameSource {
public:
    SyntheticFrameSource(std::string video_id, std::size_t frame_count);

    const std::string& video_id() const override { return id_; }
    std::size_t frame_count() const override { return count_; }
    ImageBytes read(std::size_t frame) const override;

private:
    std::string id_;
    std::size_t count_;
};

struct Segment {
    std::size_t index = 0;
    std::size_t first_frame = 0;
    std::size_t last_frame = 0;  // inclusive
    std::vector<std::size_t> frames;
    std::size_t center_frame = 0;
};

/// `count` indices spread uniformly over [first, last], endpoints included, rounded to nearest.
std::vector<std::size_t> uniform_frame_indices(std::size_t first, std::size_t last,
                                               std::size_t count);

/// Tiles [0, total_frames-1] with segments of `segment_len` frames (last may be short).
std::vector<Segment> make_segments(std::size_t total_frames, std::size_t segment_len,
                                   std::size_t frames_per_segment);

std::vector<ImageBytes> load_frames(const FrameSource& source,
                                    const std::vector<std::size_t>& indices);

}  // namespace vad
