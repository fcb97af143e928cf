#include "vithsd/service/round_store.hpp"

#include <algorithm>
#include <chrono>

#include "vithsd/annotation/annotation_io.hpp"
#include "vithsd/core/errors.hpp"

namespace vithsd::service {

using annotation::AnnotationRound;

RoundSpec RoundSpec::from_json(const nlohmann::json& j, double default_threshold, std::size_t default_per_comment) {
    if (!j.is_object()) raise(ErrorCode::ParseError, "round body must be a JSON object");
    RoundSpec s;
    try {
        s.id = j.at("id").get<std::string>();
        for (const auto& c : j.at("comments")) {
            Comment cm;
            cm.id = c.at("id").is_string() ? c["id"].get<std::string>() : c["id"].dump();
            cm.text = c.at("text").get<std::string>();
            if (c.contains("ts") && c["ts"].is_number_integer()) cm.timestamp_ms = c["ts"].get<std::int64_t>();
            cm.source = c.value("source", "");
            s.comments.push_back(std::move(cm));
        }
        for (const auto& a : j.at("annotators")) {
            if (a.is_string()) {
                s.roster.push_back(a.get<std::string>());
            } else {
                const auto id = a.at("id").get<std::string>();
                s.roster.push_back(id);
                if (a.contains("token") && a["token"].is_string()) s.tokens[id] = a["token"].get<std::string>();
            }
        }
        s.kappa_threshold = j.value("kappa_threshold", default_threshold);
        s.annotators_per_comment = j.value("annotators_per_comment", default_per_comment);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::ParseError, std::string("round body: ") + e.what());
    }
    return s;
}

nlohmann::json RoundSpec::to_json() const {
    nlohmann::json comments_json = nlohmann::json::array();
    for (const auto& c : comments) {
        nlohmann::json cj = {{"id", c.id}, {"text", c.text}};
        if (c.timestamp_ms) cj["ts"] = *c.timestamp_ms;
        if (!c.source.empty()) cj["source"] = c.source;
        comments_json.push_back(cj);
    }
    nlohmann::json annotators = nlohmann::json::array();
    for (const auto& a : roster) {
        auto it = tokens.find(a);
        if (it == tokens.end()) annotators.push_back(a);
        else annotators.push_back({{"id", a}, {"token", it->second}});
    }
    return {{"id", id},
            {"comments", comments_json},
            {"annotators", annotators},
            {"kappa_threshold", kappa_threshold},
            {"annotators_per_comment", annotators_per_comment}};
}

nlohmann::json round_snapshot_json(const AnnotationRound& round) {
    nlohmann::json comments = nlohmann::json::array();
    for (const auto& c : round.comments()) comments.push_back({{"id", c.id}, {"text", c.text}});
    nlohmann::json j = {{"id", round.id()},
                        {"status", annotation::status_name(round.status())},
                        {"kappa_threshold", round.kappa_threshold()},
                        {"annotators_per_comment", round.annotators_per_comment()},
                        {"annotators", round.roster()},
                        {"comments", comments},
                        {"record_count", round.record_count()}};
    j["gate"] = round.last_gate() ? annotation::to_json(*round.last_gate()) : nlohmann::json(nullptr);
    return j;
}

RoundStore::RoundStore(std::optional<std::filesystem::path> data_dir) {
    if (!data_dir) return;
    std::error_code ec;
    std::filesystem::create_directories(*data_dir, ec);
    if (ec) raise(ErrorCode::IoError, "cannot create data directory '" + data_dir->string() + "': " + ec.message());
    const auto file = *data_dir / "rounds.jsonl";
    replay(file);
    journal_ = std::make_unique<std::ofstream>(file, std::ios::app | std::ios::binary);
    if (!*journal_) raise(ErrorCode::IoError, "cannot open round journal '" + file.string() + "'");
}

void RoundStore::replay(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return;
    replaying_ = true;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json ev;
        try {
            ev = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            if (in.peek() == std::char_traits<char>::eof()) break;  // torn tail
            replaying_ = false;
            raise(ErrorCode::ParseError, "round journal line " + std::to_string(lineno) + " is not JSON");
        }
        const std::string kind = ev.value("event", "");
        if (kind == "create") {
            create(RoundSpec::from_json(ev["spec"], annotation::kDefaultKappaThreshold,
                                        annotation::kDefaultAnnotatorsPerComment));
        } else if (kind == "submit") {
            auto entry = find(ev["round"]);
            entry->round.submit(annotation::record_from_json(ev["record"]));
        } else if (kind == "gate") {
            gate(ev["round"]);
        } else if (kind == "reopen") {
            reopen(ev["round"], ev["new_id"]);
        } else {
            replaying_ = false;
            raise(ErrorCode::ParseError, "round journal line " + std::to_string(lineno) + " has unknown event");
        }
    }
    replaying_ = false;
}

void RoundStore::journal(const nlohmann::json& event) {
    if (replaying_ || !journal_) return;
    std::lock_guard lock(journal_mu_);
    (*journal_) << event.dump() << '\n';
    journal_->flush();
    if (!*journal_) raise(ErrorCode::IoError, "round journal write failed");
}

std::shared_ptr<RoundStore::Entry> RoundStore::find(const std::string& id) const {
    std::lock_guard lock(map_mu_);
    auto it = rounds_.find(id);
    if (it == rounds_.end()) raise(ErrorCode::UnknownRound, id);
    return it->second;
}

nlohmann::json RoundStore::create(const RoundSpec& spec) {
    for (const auto& [annotator, _] : spec.tokens) {
        if (std::find(spec.roster.begin(), spec.roster.end(), annotator) == spec.roster.end()) {
            raise(ErrorCode::UnknownAnnotator, annotator);
        }
    }
    AnnotationRound round(spec.id, spec.comments, spec.roster, spec.kappa_threshold, spec.annotators_per_comment);
    nlohmann::json snap = round_snapshot_json(round);
    {
        std::lock_guard lock(map_mu_);
        if (rounds_.count(spec.id)) raise(ErrorCode::RoundExists, spec.id);
        rounds_.emplace(spec.id, std::make_shared<Entry>(std::move(round), spec.tokens));
    }
    journal({{"event", "create"}, {"spec", spec.to_json()}});
    return snap;
}

void RoundStore::submit(const std::string& round_id, annotation::AnnotationRecord record,
                        const std::optional<std::string>& bearer) {
    auto entry = find(round_id);
    std::lock_guard lock(entry->mu);
    auto tok = entry->tokens.find(record.annotator_id);
    if (tok != entry->tokens.end() && (!bearer || *bearer != tok->second)) {
        raise(ErrorCode::Unauthorized, "bad or missing token for annotator '" + record.annotator_id + "'");
    }
    if (record.submitted_at == 0) {
        record.submitted_at = std::chrono::duration_cast<std::chrono::milliseconds>(
                                  std::chrono::system_clock::now().time_since_epoch())
                                  .count();
    }
    entry->round.submit(record);
    journal({{"event", "submit"}, {"round", round_id}, {"record", annotation::to_json(record)}});
}

annotation::GateOutcome RoundStore::gate(const std::string& round_id) {
    auto entry = find(round_id);
    std::lock_guard lock(entry->mu);
    AnnotationRound trial = entry->round;
    if (trial.status() == annotation::RoundStatus::Open) trial.close();
    auto outcome = trial.gate();  // throws before anything is replaced
    entry->round = std::move(trial);
    journal({{"event", "gate"}, {"round", round_id}});
    return outcome;
}

std::vector<annotation::VoteResult> RoundStore::votes(const std::string& round_id) const {
    auto entry = find(round_id);
    std::lock_guard lock(entry->mu);
    if (entry->round.status() != annotation::RoundStatus::Passed) {
        raise(ErrorCode::InvalidTransition, "round '" + round_id + "' is " +
                                                std::string(annotation::status_name(entry->round.status())) +
                                                "; labels are final only after a passed gate");
    }
    return entry->round.votes();
}

nlohmann::json RoundStore::reopen(const std::string& round_id, const std::string& new_id) {
    auto entry = find(round_id);
    std::shared_ptr<Entry> fresh;
    {
        std::lock_guard lock(entry->mu);
        fresh = std::make_shared<Entry>(entry->round.reopen_as(new_id), entry->tokens);
    }
    nlohmann::json snap = round_snapshot_json(fresh->round);
    {
        std::lock_guard lock(map_mu_);
        if (rounds_.count(new_id)) raise(ErrorCode::RoundExists, new_id);
        rounds_.emplace(new_id, fresh);
    }
    journal({{"event", "reopen"}, {"round", round_id}, {"new_id", new_id}});
    return snap;
}

annotation::AgreementReport RoundStore::agreement(const std::string& round_id, annotation::AgreementMode mode) const {
    auto entry = find(round_id);
    std::lock_guard lock(entry->mu);
    return entry->round.agreement(mode);
}

std::vector<Comment> RoundStore::tasks(const std::string& round_id, const std::string& annotator,
                                       std::size_t limit) const {
    auto entry = find(round_id);
    std::lock_guard lock(entry->mu);
    return entry->round.tasks_for(annotator, limit);
}

nlohmann::json RoundStore::snapshot(const std::string& round_id) const {
    auto entry = find(round_id);
    std::lock_guard lock(entry->mu);
    return round_snapshot_json(entry->round);
}

std::vector<annotation::AnnotationRecord> RoundStore::records(const std::string& round_id) const {
    auto entry = find(round_id);
    std::lock_guard lock(entry->mu);
    return entry->round.records();
}

std::vector<std::string> RoundStore::ids() const {
    std::lock_guard lock(map_mu_);
    std::vector<std::string> out;
    for (const auto& [id, _] : rounds_) out.push_back(id);
    return out;
}

}  // namespace vithsd::service
