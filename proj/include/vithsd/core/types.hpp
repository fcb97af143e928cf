#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vithsd {

/// The five communities a comment may be aimed at. The underlying values fix
/// the column order used everywhere (label vectors, model heads, CSV files).
enum class Target : std::uint8_t {
    Individuals = 0,
    Groups = 1,
    ReligionCreed = 2,
    RaceEthnicity = 3,
    Politics = 4,
};

inline constexpr std::size_t kNumTargets = 5;
inline constexpr std::array<Target, kNumTargets> kAllTargets = {
    Target::Individuals, Target::Groups, Target::ReligionCreed, Target::RaceEthnicity,
    Target::Politics};

/// Per-target intensity. Normal means the target is not mentioned at all; it
/// is never emitted as a term.
enum class HatredLevel : std::uint8_t {
    Normal = 0,
    Clean = 1,
    Offensive = 2,
    Hate = 3,
};

inline constexpr std::size_t kNumLevels = 4;
inline constexpr std::array<HatredLevel, kNumLevels> kAllLevels = {
    HatredLevel::Normal, HatredLevel::Clean, HatredLevel::Offensive, HatredLevel::Hate};

constexpr std::size_t index_of(Target t) noexcept { return static_cast<std::size_t>(t); }
constexpr int code_of(HatredLevel l) noexcept { return static_cast<int>(l); }

std::string_view slug(Target t) noexcept;
std::string_view display_name(Target t) noexcept;
std::string_view level_name(HatredLevel l) noexcept;

/// Resolves canonical slugs and the variant spellings seen in the released
/// labels ("group", "politic", "race/ethnic", ...). Case-insensitive.
std::optional<Target> resolve_target(std::string_view name);

/// The alias table, exposed for tests and header auto-detection.
const std::vector<std::pair<std::string, Target>>& target_aliases();

/// Throws InvalidLevel for anything outside {0,1,2,3}.
HatredLevel level_from_code(int code);
std::optional<HatredLevel> parse_level_name(std::string_view name);

/// One level per target; absence is Normal.
class LabelVector {
public:
    LabelVector() { levels_.fill(HatredLevel::Normal); }
    explicit LabelVector(const std::array<HatredLevel, kNumTargets>& levels) : levels_(levels) {}

    /// Throws InvalidLevel if a code is outside {0..3}.
    static LabelVector from_codes(const std::array<int, kNumTargets>& codes);

    HatredLevel operator[](Target t) const noexcept { return levels_[index_of(t)]; }
    HatredLevel at(std::size_t i) const { return levels_.at(i); }
    void set(Target t, HatredLevel l) noexcept { levels_[index_of(t)] = l; }

    std::array<int, kNumTargets> codes() const noexcept;
    const std::array<HatredLevel, kNumTargets>& levels() const noexcept { return levels_; }

    /// Number of mentioned (non-Normal) targets.
    std::size_t mentioned_count() const noexcept;

    /// Dense index in [0, 4^5) with the first target as the most significant digit.
    std::uint32_t packed() const noexcept;
    static LabelVector unpack(std::uint32_t packed);

    friend bool operator==(const LabelVector&, const LabelVector&) = default;

private:
    std::array<HatredLevel, kNumTargets> levels_;
};

/// A mentioned target paired with its level, written `slug#level`.
class TargetLevelTerm {
public:
    /// Throws InvalidLevel when level is Normal.
    TargetLevelTerm(Target target, HatredLevel level);

    Target target() const noexcept { return target_; }
    HatredLevel level() const noexcept { return level_; }
    std::string str() const;

    friend bool operator==(const TargetLevelTerm&, const TargetLevelTerm&) = default;
    friend auto operator<=>(const TargetLevelTerm&, const TargetLevelTerm&) = default;

private:
    Target target_;
    HatredLevel level_;
};

using TermList = std::vector<TargetLevelTerm>;

struct Comment {
    std::string id;
    std::string text;
    std::optional<std::int64_t> timestamp_ms;
    std::string source;
};

/// Throws InvalidComment when the id is empty or the text is blank.
void validate_comment(const Comment& c);

struct LabeledComment {
    Comment comment;
    LabelVector labels;
};

}  // namespace vithsd
