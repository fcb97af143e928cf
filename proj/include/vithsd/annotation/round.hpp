#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vithsd/annotation/types.hpp"

namespace vithsd::annotation {

inline constexpr double kDefaultKappaThreshold = 0.4;
inline constexpr std::size_t kDefaultAnnotatorsPerComment = 3;

struct GateOutcome {
    RoundStatus status = RoundStatus::Revise;
    double overall_kappa = 0.0;
    AgreementReport report;
};

/// One batch of comments labeled by a roster of annotators, gated on the
/// average pairwise Cohen's kappa (with levels).
///
/// Lifecycle: Open -> PendingGate -> {Passed, Revise}. Records may only be
/// submitted while Open; a Revise round is restarted through reopen_as().
/// The class does no locking; the owner serializes mutations.
class AnnotationRound {
public:
    AnnotationRound(std::string id, std::vector<Comment> comments, std::vector<std::string> roster,
                    double kappa_threshold = kDefaultKappaThreshold,
                    std::size_t annotators_per_comment = kDefaultAnnotatorsPerComment);

    const std::string& id() const noexcept { return id_; }
    const std::vector<Comment>& comments() const noexcept { return comments_; }
    const std::vector<std::string>& roster() const noexcept { return roster_; }
    RoundStatus status() const noexcept { return status_; }
    double kappa_threshold() const noexcept { return threshold_; }
    std::size_t annotators_per_comment() const noexcept { return per_comment_; }

    bool has_comment(const std::string& comment_id) const;
    bool has_annotator(const std::string& annotator_id) const;

    /// Round-robin assignment: comment i goes to roster members
    /// i, i+1, ... (mod roster size), annotators_per_comment of them.
    bool is_assigned(const std::string& annotator_id, const std::string& comment_id) const;

    /// Assigned comments the annotator has not labeled yet, in batch order.
    std::vector<Comment> tasks_for(const std::string& annotator_id, std::size_t limit = 0) const;

    /// Replaces any earlier record for the same (annotator, comment).
    /// Throws InvalidTransition (not Open), UnknownAnnotator, UnknownComment.
    void submit(AnnotationRecord record);

    /// All records, ordered by comment position then annotator id.
    std::vector<AnnotationRecord> records() const;
    std::size_t record_count() const noexcept { return records_.size(); }

    AgreementReport agreement(AgreementMode mode) const;

    /// Open -> PendingGate.
    void close();

    /// PendingGate -> Passed when the overall kappa strictly exceeds the
    /// threshold (votes are then finalized for every comment), else Revise.
    /// Throws GateIndeterminate, leaving the status unchanged, when no kappa
    /// is defined or when passing would leave a comment without any record.
    GateOutcome gate();

    const std::optional<GateOutcome>& last_gate() const noexcept { return last_gate_; }
    const std::vector<VoteResult>& votes() const noexcept { return votes_; }

    /// Fresh Open round over the same batch and roster. Requires Revise.
    AnnotationRound reopen_as(std::string new_id) const;

private:
    std::string id_;
    std::vector<Comment> comments_;
    std::vector<std::string> roster_;
    double threshold_;
    std::size_t per_comment_;
    RoundStatus status_ = RoundStatus::Open;
    std::map<std::string, std::size_t> comment_index_;
    std::map<std::pair<std::string, std::string>, AnnotationRecord> records_;  // (comment, annotator)
    std::optional<GateOutcome> last_gate_;
    std::vector<VoteResult> votes_;
};

/// Free-function form of AnnotationRound::gate().
GateOutcome gate_round(AnnotationRound& round);

}  // namespace vithsd::annotation
