#include "vad/lexicon.hpp"

#include <cctype>

#include "vad/common.hpp"

namespace vad::rea {

std::vector<std::string> word_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur += static_cast<char>(std::tolower(c));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

const Lexicon& Lexicon::standard() {
    static const Lexicon lex(
        {"fight",     "fighting", "assault",   "attack",    "hit",       "punch",
         "kick",      "stab",     "shoot",     "gun",       "weapon",    "rob",
         "robbery",   "steal",    "stealing",  "theft",     "burglary",  "break in",
         "breaking",  "vandal",   "vandalism", "arson",     "fire",      "explosion",
         "explode",   "crash",    "collision", "accident",  "chase",     "chasing",
         "running",   "panic",    "scream",    "blood",     "knife",     "climbing over a fence",
         "climb over a fence",    "trespass",  "trespassing"},
        {R"(\bno anomaly\b)", R"(\bthere is no anomaly\b)", R"(\bno unusual\b)",
         R"(\bno (visible )?damage\b)", R"(\bno (unusual|abnormal) (movement|events)\b)"});
    return lex;
}

Lexicon::Lexicon(std::vector<std::string> cues, std::vector<std::string> negations)
    : cues_(std::move(cues)), negation_sources_(std::move(negations)) {
    for (const auto& c : cues_) cue_tokens_.push_back(word_tokens(c));
    for (const auto& p : negation_sources_) {
        try {
            negations_.emplace_back(p, std::regex::ECMAScript | std::regex::icase);
        } catch (const std::regex_error& e) {
            throw ConfigError("malformed negation pattern '" + p + "': " + e.what());
        }
    }
}

std::size_t Lexicon::count_cues(std::string_view explanation) const {
    const auto words = word_tokens(explanation);
    std::size_t hits = 0;
    for (const auto& phrase : cue_tokens_) {
        if (phrase.empty() || phrase.size() > words.size()) continue;
        for (std::size_t i = 0; i + phrase.size() <= words.size(); ++i) {
            bool match = true;
            for (std::size_t k = 0; k < phrase.size() && match; ++k) {
                match = words[i + k] == phrase[k];
            }
            if (match) {
                ++hits;
                break;
            }
        }
    }
    return hits;
}

std::size_t Lexicon::count_negations(std::string_view explanation) const {
    const std::string text(explanation);
    std::size_t hits = 0;
    for (const auto& re : negations_) {
        if (std::regex_search(text, re)) ++hits;
    }
    return hits;
}

}  // namespace vad::rea
