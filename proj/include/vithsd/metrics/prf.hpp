#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vithsd/core/types.hpp"

namespace vithsd::metrics {

enum class EvalTask { TargetOnly, TargetLevel };
enum class Aggregation { Micro, Macro };

std::string_view task_name(EvalTask t) noexcept;
std::string_view aggregation_name(Aggregation a) noexcept;

/// Exact integer tallies. Shards reduce by summing these before any division.
struct Counts {
    std::uint64_t matched = 0;    // |P ∩ T|
    std::uint64_t predicted = 0;  // |P|
    std::uint64_t gold = 0;       // |T|

    Counts& operator+=(const Counts& o) noexcept {
        matched += o.matched;
        predicted += o.predicted;
        gold += o.gold;
        return *this;
    }
    friend bool operator==(const Counts&, const Counts&) = default;
};

struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Zero denominators give 0; f1 is 0 when precision + recall is 0.
PRF prf_from_counts(const Counts& c) noexcept;

using TargetCounts = std::array<Counts, kNumTargets>;

struct PRFReport {
    EvalTask task = EvalTask::TargetOnly;
    Aggregation mode = Aggregation::Micro;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::array<PRF, kNumTargets> per_target{};
    TargetCounts per_target_counts{};
    Counts total{};
    std::size_t comments = 0;
};

/// A comment's term set keyed by id, so prediction and gold lists can be
/// checked for alignment.
struct IdTerms {
    std::string id;
    TermList terms;
};

/// Tallies per target for one task. Every term set holds at most one term per
/// target, so summing the per-target tallies gives the corpus tallies.
/// Throws AlignmentError on length mismatch. `threads` > 1 splits the input
/// into contiguous shards evaluated concurrently.
TargetCounts count_matches(std::span<const TermList> preds, std::span<const TermList> golds, EvalTask task,
                           unsigned threads = 1);

PRFReport make_report(const TargetCounts& counts, EvalTask task, Aggregation mode, std::size_t comments);

PRFReport target_only_prf(std::span<const TermList> preds, std::span<const TermList> golds,
                          Aggregation mode = Aggregation::Micro, unsigned threads = 1);
PRFReport target_level_prf(std::span<const TermList> preds, std::span<const TermList> golds,
                           Aggregation mode = Aggregation::Micro, unsigned threads = 1);

/// Id-checked variants: position i of both lists must carry the same id,
/// otherwise AlignmentError.
PRFReport target_only_prf(std::span<const IdTerms> preds, std::span<const IdTerms> golds,
                          Aggregation mode = Aggregation::Micro);
PRFReport target_level_prf(std::span<const IdTerms> preds, std::span<const IdTerms> golds,
                           Aggregation mode = Aggregation::Micro);

/// Reorders predictions to follow the gold order. Missing, extra, or
/// duplicated ids raise AlignmentError.
std::vector<IdTerms> align_by_id(std::span<const IdTerms> preds, std::span<const IdTerms> golds);

}  // namespace vithsd::metrics
