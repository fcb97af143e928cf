#include "vithsd/metrics/confusion.hpp"

#include "vithsd/core/errors.hpp"

namespace vithsd::metrics {

std::uint64_t ConfusionMatrix::total(Target t) const noexcept {
    std::uint64_t n = 0;
    for (const auto& row : counts[index_of(t)])
        for (auto c : row) n += c;
    return n;
}

std::uint64_t ConfusionMatrix::grand_total() const noexcept {
    std::uint64_t n = 0;
    for (Target t : kAllTargets) n += total(t);
    return n;
}

std::uint64_t ConfusionMatrix::gold_count(Target t, HatredLevel gold) const noexcept {
    std::uint64_t n = 0;
    for (auto c : counts[index_of(t)][code_of(gold)]) n += c;
    return n;
}

ConfusionMatrix per_target_confusion(std::span<const LabelVector> preds, std::span<const LabelVector> golds) {
    if (preds.size() != golds.size()) {
        raise(ErrorCode::AlignmentError, std::to_string(preds.size()) + " predictions for " +
                                             std::to_string(golds.size()) + " gold comments");
    }
    ConfusionMatrix m;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        for (Target t : kAllTargets) {
            ++m.counts[index_of(t)][code_of(golds[i][t])][code_of(preds[i][t])];
        }
    }
    return m;
}

}  // namespace vithsd::metrics
