#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vithsd/annotation/round.hpp"

namespace vithsd::service {

struct RoundSpec {
    std::string id;
    std::vector<Comment> comments;
    std::vector<std::string> roster;
    std::map<std::string, std::string> tokens;  // annotator -> bearer token, optional per annotator
    double kappa_threshold = annotation::kDefaultKappaThreshold;
    std::size_t annotators_per_comment = annotation::kDefaultAnnotatorsPerComment;

    /// Accepts "annotators" as ids or {"id", "token"} objects. Missing
    /// threshold / per-comment fields take the given defaults.
    static RoundSpec from_json(const nlohmann::json& j, double default_threshold, std::size_t default_per_comment);
    nlohmann::json to_json() const;
};

/// All rounds of a service instance. Mutations on one round are serialized
/// by that round's mutex; different rounds proceed in parallel. With a data
/// directory every accepted mutation is appended to rounds.jsonl and a new
/// store over the same directory replays it to the same state.
class RoundStore {
public:
    explicit RoundStore(std::optional<std::filesystem::path> data_dir = std::nullopt);

    nlohmann::json create(const RoundSpec& spec);
    /// Throws UnknownRound, Unauthorized (token configured and not matching),
    /// plus the AnnotationRound::submit errors.
    void submit(const std::string& round_id, annotation::AnnotationRecord record,
                const std::optional<std::string>& bearer = std::nullopt);
    /// Closes an Open round and runs the gate. An indeterminate gate leaves
    /// the round untouched (still Open if it was Open).
    annotation::GateOutcome gate(const std::string& round_id);
    /// Requires Passed (InvalidTransition otherwise).
    std::vector<annotation::VoteResult> votes(const std::string& round_id) const;
    nlohmann::json reopen(const std::string& round_id, const std::string& new_id);

    annotation::AgreementReport agreement(const std::string& round_id, annotation::AgreementMode mode) const;
    std::vector<Comment> tasks(const std::string& round_id, const std::string& annotator, std::size_t limit) const;
    nlohmann::json snapshot(const std::string& round_id) const;
    std::vector<annotation::AnnotationRecord> records(const std::string& round_id) const;
    std::vector<std::string> ids() const;

private:
    struct Entry {
        mutable std::mutex mu;
        annotation::AnnotationRound round;
        std::map<std::string, std::string> tokens;
        Entry(annotation::AnnotationRound r, std::map<std::string, std::string> t)
            : round(std::move(r)), tokens(std::move(t)) {}
    };

    std::shared_ptr<Entry> find(const std::string& id) const;
    void journal(const nlohmann::json& event);
    void replay(const std::filesystem::path& file);

    mutable std::mutex map_mu_;
    std::map<std::string, std::shared_ptr<Entry>> rounds_;
    std::mutex journal_mu_;
    std::unique_ptr<std::ofstream> journal_;
    bool replaying_ = false;
};

nlohmann::json round_snapshot_json(const annotation::AnnotationRound& round);

}  // namespace vithsd::service
