#pragma once

#include <map>
#include <string>
#include <string_view>

namespace vad {

enum class PromptId { Summary, Score, ScoreWithContext, Caption, Judge };

std::string_view prompt_name(PromptId id);

/// Template bodies. Placeholders are {summary}, {labels}, {explanation}, {evidence}.
std::string_view prompt_body(PromptId id);

/// Appended to the scoring prompt on the single format retry.
std::string_view score_format_reminder();

// Substitutes the named placeholders in a single left-to-right pass; bound
// values are never rescanned, so user text containing "{summary}" is inert.
// Throws std::invalid_argument if the template references an unbound name.
std::string render_prompt(std::string_view body, const std::map<std::string, std::string>& values);

/// True if any of the four known placeholder tokens survives in `text`.
bool has_residual_placeholder(std::string_view text);

}  // namespace vad
