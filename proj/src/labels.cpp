#include "vad/labels.hpp"

#include <cctype>
#include <unordered_map>

namespace vad {

namespace {

std::string squash(std::string_view raw) {
    std::string key;
    for (unsigned char c : raw) {
        if (std::isalnum(c)) key += static_cast<char>(std::tolower(c));
    }
    return key;
}

const std::unordered_map<std::string, std::string>& alias_table() {
    static const std::unordered_map<std::string, std::string> table = [] {
        std::unordered_map<std::string, std::string> t;
        for (const auto& label : canonical_labels()) t[label] = label;
        const std::pair<const char*, const char*> aliases[] = {
            {"abused", "abuse"},           {"abusing", "abuse"},
            {"childabuse", "abuse"},       {"domesticabuse", "abuse"},
            {"arrested", "arrest"},        {"arresting", "arrest"},
            {"arrests", "arrest"},         {"fire", "arson"},
            {"arsonist", "arson"},         {"setfire", "arson"},
            {"assaulted", "assault"},      {"assaulting", "assault"},
            {"attack", "assault"},         {"burglar", "burglary"},
            {"burglars", "burglary"},      {"breakin", "burglary"},
            {"breakingin", "burglary"},    {"explode", "explosion"},
            {"exploded", "explosion"},     {"explosions", "explosion"},
            {"blast", "explosion"},        {"fight", "fighting"},
            {"fights", "fighting"},        {"brawl", "fighting"},
            {"accident", "roadaccidents"}, {"accidents", "roadaccidents"},
            {"roadaccident", "roadaccidents"}, {"caraccident", "roadaccidents"},
            {"trafficaccident", "roadaccidents"}, {"crash", "roadaccidents"},
            {"carcrash", "roadaccidents"}, {"collision", "roadaccidents"},
            {"rob", "robbery"},            {"robbed", "robbery"},
            {"robber", "robbery"},         {"robbing", "robbery"},
            {"robberies", "robbery"},      {"shoplift", "shoplifting"},
            {"shoplifter", "shoplifting"}, {"shoplifted", "shoplifting"},
            {"shoot", "shooting"},         {"shot", "shooting"},
            {"gunshot", "shooting"},       {"shootings", "shooting"},
            {"steal", "stealing"},         {"stole", "stealing"},
            {"stolen", "stealing"},        {"theft", "stealing"},
            {"vandal", "vandalism"},       {"vandals", "vandalism"},
            {"vandalize", "vandalism"},    {"vandalized", "vandalism"},
        };
        for (const auto& [alias, label] : aliases) t[alias] = label;
        return t;
    }();
    return table;
}

}  // namespace

const std::vector<std::string>& canonical_labels() {
    static const std::vector<std::string> labels = {
        "abuse",    "arrest",       "arson",   "assault",     "burglary", "explosion", "fighting",
        "roadaccidents", "robbery", "shoplifting", "shooting", "stealing", "vandalism"};
    return labels;
}

std::string normalize_alias(std::string_view raw) {
    const auto& table = alias_table();
    auto it = table.find(squash(raw));
    return it == table.end() ? std::string(kUnknownLabel) : it->second;
}

}  // namespace vad
