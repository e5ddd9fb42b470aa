#pragma once

#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace vad::rea {

// Fixed, dataset-agnostic cue vocabulary and negation patterns for the
// evidence field. Never swapped per dataset.
class Lexicon {
public:
    /// The built-in vocabulary. Throws ConfigError if a pattern fails to compile.
    static const Lexicon& standard();

    Lexicon(std::vector<std::string> cues, std::vector<std::string> negations);

    const std::vector<std::string>& cue_keywords() const { return cues_; }
    const std::vector<std::string>& negation_patterns() const { return negation_sources_; }

    /// Distinct cue phrases present as whole-word sequences (case-insensitive).
    std::size_t count_cues(std::string_view explanation) const;
    /// Distinct negation patterns firing at least once (case-insensitive).
    std::size_t count_negations(std::string_view explanation) const;

private:
    std::vector<std::string> cues_;
    std::vector<std::vector<std::string>> cue_tokens_;
    std::vector<std::string> negation_sources_;
    std::vector<std::regex> negations_;
};

/// Lowercased alphanumeric word tokens; every other character is a boundary.
std::vector<std::string> word_tokens(std::string_view text);

}  // namespace vad::rea
