#include "vithsd/annotation/vote.hpp"

#include <algorithm>
#include <map>

#include "vithsd/core/errors.hpp"

namespace vithsd::annotation {

VoteResult majority_vote(std::span<const AnnotationRecord> records) {
    if (records.empty()) raise(ErrorCode::EmptyInput, "majority_vote needs at least one record");

    VoteResult result;
    result.comment_id = records.front().comment_id;
    for (Target t : kAllTargets) {
        std::array<int, kNumLevels> counts{};
        for (const auto& r : records) ++counts[static_cast<std::size_t>(code_of(r.labels[t]))];

        int best = 0;
        for (int c : counts) best = std::max(best, c);
        auto& candidates = result.candidates[index_of(t)];
        for (HatredLevel l : kAllLevels) {
            if (counts[static_cast<std::size_t>(code_of(l))] == best) candidates.push_back(l);
        }
        // candidates ascend by code, so the last one is the most severe
        result.labels.set(t, candidates.back());
        result.tie[index_of(t)] = candidates.size() > 1;
        result.support[index_of(t)] = best;
    }
    return result;
}

std::vector<VoteResult> vote_all(std::span<const AnnotationRecord> records) {
    std::vector<std::string> order;
    // comment -> annotator -> record; a later record from the same annotator replaces the earlier one
    std::map<std::string, std::map<std::string, AnnotationRecord>> groups;
    for (const auto& r : records) {
        auto [it, inserted] = groups.try_emplace(r.comment_id);
        if (inserted) order.push_back(r.comment_id);
        it->second.insert_or_assign(r.annotator_id, r);
    }
    std::vector<VoteResult> out;
    out.reserve(order.size());
    for (const auto& id : order) {
        std::vector<AnnotationRecord> group;
        for (auto& [annotator, record] : groups[id]) group.push_back(record);
        out.push_back(majority_vote(group));
    }
    return out;
}

}  // namespace vithsd::annotation
