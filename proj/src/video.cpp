#include "vad/video.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vad {

DirectoryFrameSource::DirectoryFrameSource(std::string video_id, const std::filesystem::path& dir)
    : id_(std::move(video_id)) {
    if (!std::filesystem::is_directory(dir)) {
        throw std::runtime_error("frame directory not found: " + dir.string());
    }
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file()) files_.push_back(e.path());
    }
    std::sort(files_.begin(), files_.end());
}

ImageBytes DirectoryFrameSource::read(std::size_t frame) const {
    if (frame >= files_.size()) throw std::out_of_range("frame index out of range");
    std::ifstream in(files_[frame], std::ios::binary);
    if (!in) throw std::runtime_error("cannot read frame " + files_[frame].string());
    std::ostringstream os;
    os << in.rdbuf();
    auto bytes = os.str();
    if (bytes.empty()) throw std::runtime_error("empty frame file " + files_[frame].string());
    return bytes;
}

SyntheticFrameSource::SyntheticFrameSource(std::string video_id, std::size_t frame_count)
    : id_(std::move(video_id)), count_(frame_count) {}

ImageBytes SyntheticFrameSource::read(std::size_t frame) const {
    if (frame >= count_) throw std::out_of_range("frame index out of range");
    return id_ + "#" + std::to_string(frame);
}

std::vector<std::size_t> uniform_frame_indices(std::size_t first, std::size_t last,
                                               std::size_t count) {
    if (last < first) throw std::invalid_argument("uniform_frame_indices: last < first");
    std::vector<std::size_t> out;
    out.reserve(count);
    if (count == 1) {
        out.push_back(first + (last - first) / 2);
        return out;
    }
    const double span = static_cast<double>(last - first);
    for (std::size_t k = 0; k < count; ++k) {
        double pos = static_cast<double>(first) + span * static_cast<double>(k) /
                                                      static_cast<double>(count - 1);
        out.push_back(static_cast<std::size_t>(std::llround(pos)));
    }
    return out;
}

std::vector<Segment> make_segments(std::size_t total_frames, std::size_t segment_len,
                                   std::size_t frames_per_segment) {
    if (total_frames == 0) throw PreconditionError("video has no frames");
    if (segment_len == 0 || frames_per_segment == 0) {
        throw PreconditionError("segment length and frames per segment must be positive");
    }
    std::vector<Segment> segs;
    for (std::size_t start = 0, i = 0; start < total_frames; start += segment_len, ++i) {
        Segment s;
        s.index = i;
        s.first_frame = start;
        s.last_frame = std::min(total_frames, start + segment_len) - 1;
        s.frames = uniform_frame_indices(s.first_frame, s.last_frame, frames_per_segment);
        s.center_frame = s.frames[frames_per_segment / 2];
        segs.push_back(std::move(s));
    }
    return segs;
}

std::vector<ImageBytes> load_frames(const FrameSource& source,
                                    const std::vector<std::size_t>& indices) {
    std::vector<ImageBytes> out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back(source.read(i));
    return out;
}

}  // namespace vad
