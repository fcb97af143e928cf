#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "vithsd/core/types.hpp"

namespace vithsd::metrics {

/// Per target, counts indexed [gold level][predicted level], Normal included.
struct ConfusionMatrix {
    using Grid = std::array<std::array<std::uint64_t, kNumLevels>, kNumLevels>;
    std::array<Grid, kNumTargets> counts{};

    std::uint64_t at(Target t, HatredLevel gold, HatredLevel pred) const {
        return counts[index_of(t)][code_of(gold)][code_of(pred)];
    }
    std::uint64_t total(Target t) const noexcept;
    std::uint64_t grand_total() const noexcept;
    std::uint64_t gold_count(Target t, HatredLevel gold) const noexcept;
};

/// Throws AlignmentError when the lists differ in length.
ConfusionMatrix per_target_confusion(std::span<const LabelVector> preds, std::span<const LabelVector> golds);

}  // namespace vithsd::metrics
