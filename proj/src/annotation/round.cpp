#include "vithsd/annotation/round.hpp"

#include <algorithm>
#include <set>

#include "vithsd/annotation/agreement.hpp"
#include "vithsd/annotation/vote.hpp"
#include "vithsd/core/errors.hpp"

namespace vithsd::annotation {

std::string_view status_name(RoundStatus s) noexcept {
    switch (s) {
        case RoundStatus::Open: return "Open";
        case RoundStatus::PendingGate: return "PendingGate";
        case RoundStatus::Passed: return "Passed";
        case RoundStatus::Revise: return "Revise";
    }
    return "";
}

std::optional<RoundStatus> parse_status(std::string_view s) {
    for (auto st : {RoundStatus::Open, RoundStatus::PendingGate, RoundStatus::Passed, RoundStatus::Revise}) {
        if (status_name(st) == s) return st;
    }
    return std::nullopt;
}

AnnotationRound::AnnotationRound(std::string id, std::vector<Comment> comments, std::vector<std::string> roster,
                                 double kappa_threshold, std::size_t annotators_per_comment)
    : id_(std::move(id)),
      comments_(std::move(comments)),
      roster_(std::move(roster)),
      threshold_(kappa_threshold),
      per_comment_(annotators_per_comment) {
    if (id_.empty()) raise(ErrorCode::InvalidConfig, "round id is empty");
    if (!(threshold_ > 0.0 && threshold_ < 1.0)) {
        raise(ErrorCode::InvalidConfig, "kappa threshold must lie in (0, 1)");
    }
    if (per_comment_ < 1) raise(ErrorCode::InvalidConfig, "annotators per comment must be >= 1");
    if (roster_.empty()) raise(ErrorCode::InvalidConfig, "round '" + id_ + "' has an empty roster");
    std::set<std::string> unique_roster(roster_.begin(), roster_.end());
    if (unique_roster.size() != roster_.size()) {
        raise(ErrorCode::InvalidConfig, "round '" + id_ + "' lists an annotator twice");
    }
    for (std::size_t i = 0; i < comments_.size(); ++i) {
        validate_comment(comments_[i]);
        if (!comment_index_.emplace(comments_[i].id, i).second) {
            raise(ErrorCode::InvalidComment, "duplicate comment id '" + comments_[i].id + "'");
        }
    }
}

bool AnnotationRound::has_comment(const std::string& comment_id) const {
    return comment_index_.count(comment_id) > 0;
}

bool AnnotationRound::has_annotator(const std::string& annotator_id) const {
    return std::find(roster_.begin(), roster_.end(), annotator_id) != roster_.end();
}

bool AnnotationRound::is_assigned(const std::string& annotator_id, const std::string& comment_id) const {
    const auto pos = std::find(roster_.begin(), roster_.end(), annotator_id);
    const auto it = comment_index_.find(comment_id);
    if (pos == roster_.end() || it == comment_index_.end()) return false;
    const std::size_t r = roster_.size();
    const std::size_t member = static_cast<std::size_t>(pos - roster_.begin());
    const std::size_t width = std::min(per_comment_, r);
    const std::size_t offset = (member + r - it->second % r) % r;
    return offset < width;
}

std::vector<Comment> AnnotationRound::tasks_for(const std::string& annotator_id, std::size_t limit) const {
    std::vector<Comment> out;
    for (const auto& c : comments_) {
        if (limit > 0 && out.size() >= limit) break;
        if (!is_assigned(annotator_id, c.id)) continue;
        if (records_.count({c.id, annotator_id}) > 0) continue;
        out.push_back(c);
    }
    return out;
}

void AnnotationRound::submit(AnnotationRecord record) {
    if (status_ != RoundStatus::Open) {
        raise(ErrorCode::InvalidTransition,
              "round '" + id_ + "' is " + std::string(status_name(status_)) + ", not Open");
    }
    if (!has_annotator(record.annotator_id)) {
        raise(ErrorCode::UnknownAnnotator, "'" + record.annotator_id + "' is not on the roster of '" + id_ + "'");
    }
    if (!has_comment(record.comment_id)) {
        raise(ErrorCode::UnknownComment, "'" + record.comment_id + "' is not in round '" + id_ + "'");
    }
    auto key = std::make_pair(record.comment_id, record.annotator_id);
    records_.insert_or_assign(std::move(key), std::move(record));
}

std::vector<AnnotationRecord> AnnotationRound::records() const {
    std::vector<AnnotationRecord> out;
    out.reserve(records_.size());
    for (const auto& [key, rec] : records_) out.push_back(rec);
    std::stable_sort(out.begin(), out.end(), [&](const AnnotationRecord& a, const AnnotationRecord& b) {
        const auto ia = comment_index_.at(a.comment_id);
        const auto ib = comment_index_.at(b.comment_id);
        if (ia != ib) return ia < ib;
        return a.annotator_id < b.annotator_id;
    });
    return out;
}

AgreementReport AnnotationRound::agreement(AgreementMode mode) const {
    const auto recs = records();
    return agreement_report(recs, mode, roster_);
}

void AnnotationRound::close() {
    if (status_ != RoundStatus::Open) {
        raise(ErrorCode::InvalidTransition,
              "cannot close round '" + id_ + "' in status " + std::string(status_name(status_)));
    }
    status_ = RoundStatus::PendingGate;
}

GateOutcome AnnotationRound::gate() {
    if (status_ != RoundStatus::PendingGate) {
        raise(ErrorCode::InvalidTransition,
              "cannot gate round '" + id_ + "' in status " + std::string(status_name(status_)));
    }
    GateOutcome outcome;
    outcome.report = agreement(AgreementMode::WithLevels);
    if (!outcome.report.overall) {
        raise(ErrorCode::GateIndeterminate, "round '" + id_ + "' has no computable kappa");
    }
    outcome.overall_kappa = *outcome.report.overall;
    const bool passes = outcome.overall_kappa > threshold_;

    std::vector<VoteResult> votes;
    if (passes) {
        const auto recs = records();
        std::map<std::string, std::vector<AnnotationRecord>> by_comment;
        for (const auto& r : recs) by_comment[r.comment_id].push_back(r);
        for (const auto& c : comments_) {
            auto it = by_comment.find(c.id);
            if (it == by_comment.end()) {
                raise(ErrorCode::GateIndeterminate,
                      "round '" + id_ + "' passes but comment '" + c.id + "' has no annotations to vote on");
            }
            votes.push_back(majority_vote(it->second));
        }
    }
    outcome.status = passes ? RoundStatus::Passed : RoundStatus::Revise;
    status_ = outcome.status;
    votes_ = std::move(votes);
    last_gate_ = outcome;
    return outcome;
}

AnnotationRound AnnotationRound::reopen_as(std::string new_id) const {
    if (status_ != RoundStatus::Revise) {
        raise(ErrorCode::InvalidTransition, "only Revise rounds can be reopened ('" + id_ + "' is " +
                                                std::string(status_name(status_)) + ")");
    }
    return AnnotationRound(std::move(new_id), comments_, roster_, threshold_, per_comment_);
}

GateOutcome gate_round(AnnotationRound& round) { return round.gate(); }

}  // namespace vithsd::annotation
