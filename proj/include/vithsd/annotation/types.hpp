#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vithsd/core/types.hpp"

namespace vithsd::annotation {

struct AnnotationRecord {
    std::string annotator_id;
    std::string comment_id;
    LabelVector labels;
    std::int64_t submitted_at = 0;

    friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

enum class RoundStatus { Open, PendingGate, Passed, Revise };

std::string_view status_name(RoundStatus s) noexcept;
std::optional<RoundStatus> parse_status(std::string_view s);

/// WithLevels compares the four codes; Presence collapses them to
/// mentioned (1..3) vs not mentioned (0).
enum class AgreementMode { WithLevels, Presence };

struct PairAgreement {
    std::string first;
    std::string second;
    std::size_t overlap = 0;  ///< co-annotated comments
    std::array<std::optional<double>, kNumTargets> kappa{};

    bool no_overlap() const noexcept { return overlap == 0; }
};

struct AgreementReport {
    AgreementMode mode = AgreementMode::WithLevels;
    std::vector<PairAgreement> pairs;
    /// Mean over pairs with a defined kappa, per target.
    std::array<std::optional<double>, kNumTargets> target_mean{};
    /// Pairs that overlap but whose kappa is Undefined, per target.
    std::array<std::size_t, kNumTargets> undefined_count{};
    std::size_t no_overlap_pairs = 0;
    /// Mean of the defined per-target means.
    std::optional<double> overall;
};

struct VoteResult {
    std::string comment_id;
    LabelVector labels;
    std::array<bool, kNumTargets> tie{};
    std::array<int, kNumTargets> support{};
    /// Levels that shared the maximal count, per target (one entry when no tie).
    std::array<std::vector<HatredLevel>, kNumTargets> candidates{};
};

}  // namespace vithsd::annotation
