#include "vithsd/core/types.hpp"

#include <algorithm>
#include <cctype>

#include "vithsd/core/errors.hpp"

namespace vithsd {

namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

std::string_view slug(Target t) noexcept {
    switch (t) {
        case Target::Individuals: return "individuals";
        case Target::Groups: return "groups";
        case Target::ReligionCreed: return "religion/creed";
        case Target::RaceEthnicity: return "race/ethnicity";
        case Target::Politics: return "politics";
    }
    return "";
}

std::string_view display_name(Target t) noexcept {
    switch (t) {
        case Target::Individuals: return "Individuals";
        case Target::Groups: return "Groups";
        case Target::ReligionCreed: return "Religion/creed";
        case Target::RaceEthnicity: return "Race/ethnicity";
        case Target::Politics: return "Politics";
    }
    return "";
}

std::string_view level_name(HatredLevel l) noexcept {
    switch (l) {
        case HatredLevel::Normal: return "normal";
        case HatredLevel::Clean: return "clean";
        case HatredLevel::Offensive: return "offensive";
        case HatredLevel::Hate: return "hate";
    }
    return "";
}

const std::vector<std::pair<std::string, Target>>& target_aliases() {
    static const std::vector<std::pair<std::string, Target>> table = {
        {"individuals", Target::Individuals},
        {"individual", Target::Individuals},
        {"groups", Target::Groups},
        {"group", Target::Groups},
        {"religion/creed", Target::ReligionCreed},
        {"religion-creed", Target::ReligionCreed},
        {"religion_creed", Target::ReligionCreed},
        {"religion", Target::ReligionCreed},
        {"religions", Target::ReligionCreed},
        {"creed", Target::ReligionCreed},
        {"race/ethnicity", Target::RaceEthnicity},
        {"race/ethnic", Target::RaceEthnicity},
        {"race-ethnicity", Target::RaceEthnicity},
        {"race_ethnicity", Target::RaceEthnicity},
        {"race", Target::RaceEthnicity},
        {"ethnicity", Target::RaceEthnicity},
        {"politics", Target::Politics},
        {"politic", Target::Politics},
        {"political", Target::Politics},
    };
    return table;
}

std::optional<Target> resolve_target(std::string_view name) {
    const std::string key = ascii_lower(name);
    for (const auto& [alias, target] : target_aliases()) {
        if (alias == key) return target;
    }
    return std::nullopt;
}

HatredLevel level_from_code(int code) {
    if (code < 0 || code > 3) {
        raise(ErrorCode::InvalidLevel, "level code " + std::to_string(code) + " is outside 0..3");
    }
    return static_cast<HatredLevel>(code);
}

std::optional<HatredLevel> parse_level_name(std::string_view name) {
    const std::string key = ascii_lower(name);
    for (HatredLevel l : kAllLevels) {
        if (level_name(l) == key) return l;
    }
    return std::nullopt;
}

LabelVector LabelVector::from_codes(const std::array<int, kNumTargets>& codes) {
    LabelVector v;
    for (std::size_t i = 0; i < kNumTargets; ++i) v.levels_[i] = level_from_code(codes[i]);
    return v;
}

std::array<int, kNumTargets> LabelVector::codes() const noexcept {
    std::array<int, kNumTargets> out{};
    for (std::size_t i = 0; i < kNumTargets; ++i) out[i] = code_of(levels_[i]);
    return out;
}

std::size_t LabelVector::mentioned_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(
        levels_.begin(), levels_.end(), [](HatredLevel l) { return l != HatredLevel::Normal; }));
}

std::uint32_t LabelVector::packed() const noexcept {
    std::uint32_t p = 0;
    for (HatredLevel l : levels_) p = p * 4 + static_cast<std::uint32_t>(l);
    return p;
}

LabelVector LabelVector::unpack(std::uint32_t packed) {
    if (packed >= 1024) raise(ErrorCode::InvalidLevel, "packed label vector out of range");
    LabelVector v;
    for (std::size_t i = kNumTargets; i-- > 0;) {
        v.levels_[i] = static_cast<HatredLevel>(packed % 4);
        packed /= 4;
    }
    return v;
}

TargetLevelTerm::TargetLevelTerm(Target target, HatredLevel level) : target_(target), level_(level) {
    if (level == HatredLevel::Normal) {
        raise(ErrorCode::InvalidLevel,
              std::string("normal is not a hatred level (target ") + std::string(slug(target)) + ")");
    }
}

std::string TargetLevelTerm::str() const {
    return std::string(slug(target_)) + "#" + std::string(level_name(level_));
}

void validate_comment(const Comment& c) {
    if (c.id.empty()) raise(ErrorCode::InvalidComment, "comment id is empty");
    if (is_blank(c.text)) raise(ErrorCode::InvalidComment, "comment '" + c.id + "' has blank text");
}

}  // namespace vithsd
