#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vad {

inline constexpr std::string_view kUnknownLabel = "unknown";

/// The 13 UCF-Crime anomaly classes used for closed-set judging.
const std::vector<std::string>& canonical_labels();

/// Case-insensitive alias lookup onto a canonical label; "unknown" when unmapped.
std::string normalize_alias(std::string_view raw);

}  // namespace vad
