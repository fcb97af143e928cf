#include "vithsd/annotation/annotation_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "vithsd/core/csv.hpp"
#include "vithsd/core/errors.hpp"

namespace vithsd::annotation {

namespace {

std::string lower_trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string fmt(const std::optional<double>& v, bool no_overlap) {
    if (no_overlap) return "no_overlap";
    return v ? fmt(*v) : "undefined";
}

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

}  // namespace

std::vector<AnnotationRecord> load_annotation_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    csv::Reader reader(in);
    const auto header = reader.next();
    if (!header || (header->size() == 1 && header->front().empty())) {
        raise(ErrorCode::EmptyInput, "'" + path.string() + "' contains no annotation records");
    }

    std::optional<std::size_t> annotator_idx, comment_idx, ts_idx;
    std::array<std::optional<std::size_t>, kNumTargets> level_idx{};
    for (std::size_t i = 0; i < header->size(); ++i) {
        const std::string h = lower_trim((*header)[i]);
        if (h == "annotator_id" || h == "annotator") annotator_idx = i;
        else if (h == "comment_id" || h == "id") comment_idx = i;
        else if (h == "submitted_at") ts_idx = i;
        else if (auto t = resolve_target(h); t && !level_idx[index_of(*t)]) level_idx[index_of(*t)] = i;
    }
    if (!annotator_idx) raise(ErrorCode::SchemaError, "missing column 'annotator_id'");
    if (!comment_idx) raise(ErrorCode::SchemaError, "missing column 'comment_id'");
    for (Target t : kAllTargets) {
        if (!level_idx[index_of(t)]) {
            raise(ErrorCode::SchemaError, "missing level column for '" + std::string(slug(t)) + "'");
        }
    }

    std::vector<AnnotationRecord> out;
    std::size_t row_index = 0;
    while (auto row = reader.next()) {
        if (row->size() == 1 && row->front().empty()) continue;
        if (row->size() < header->size()) {
            raise(ErrorCode::SchemaError, "record row " + std::to_string(row_index) + " is short");
        }
        AnnotationRecord rec;
        rec.annotator_id = (*row)[*annotator_idx];
        rec.comment_id = (*row)[*comment_idx];
        std::array<int, kNumTargets> codes{};
        for (std::size_t t = 0; t < kNumTargets; ++t) {
            const std::string& f = (*row)[*level_idx[t]];
            int v = -1;
            const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc() || p != f.data() + f.size() || v < 0 || v > 3) {
                raise(ErrorCode::InvalidLevel,
                      "record row " + std::to_string(row_index) + ": level '" + f + "' is outside {0,1,2,3}");
            }
            codes[t] = v;
        }
        rec.labels = LabelVector::from_codes(codes);
        if (ts_idx && !(*row)[*ts_idx].empty()) rec.submitted_at = std::stoll((*row)[*ts_idx]);
        out.push_back(std::move(rec));
        ++row_index;
    }
    if (out.empty()) raise(ErrorCode::EmptyInput, "'" + path.string() + "' contains no annotation records");
    return out;
}

void write_annotation_records(const std::filesystem::path& path, const std::vector<AnnotationRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    csv::Row header = {"annotator_id", "comment_id"};
    for (Target t : kAllTargets) header.emplace_back(slug(t));
    header.emplace_back("submitted_at");
    out << csv::format_row(header) << '\n';
    for (const auto& r : records) {
        csv::Row row = {r.annotator_id, r.comment_id};
        for (int c : r.labels.codes()) row.push_back(std::to_string(c));
        row.push_back(std::to_string(r.submitted_at));
        out << csv::format_row(row) << '\n';
    }
}

std::string agreement_csv(const AgreementReport& report) {
    std::ostringstream out;
    csv::Row header = {"pair"};
    for (Target t : kAllTargets) header.emplace_back(slug(t));
    header.emplace_back("k");
    header.emplace_back("overlap");
    out << csv::format_row(header) << '\n';
    for (const auto& p : report.pairs) {
        csv::Row row = {p.first + "|" + p.second};
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& k : p.kappa) {
            row.push_back(fmt(k, p.no_overlap()));
            if (k) {
                sum += *k;
                ++n;
            }
        }
        row.push_back(p.no_overlap() ? "no_overlap" : (n > 0 ? fmt(sum / static_cast<double>(n)) : "undefined"));
        row.push_back(std::to_string(p.overlap));
        out << csv::format_row(row) << '\n';
    }
    csv::Row summary = {"average"};
    for (const auto& m : report.target_mean) summary.push_back(fmt(m, false));
    summary.push_back(fmt(report.overall, false));
    summary.push_back("");
    out << csv::format_row(summary) << '\n';
    return out.str();
}

std::string votes_csv(const std::vector<VoteResult>& votes) {
    std::ostringstream out;
    csv::Row header = {"comment_id"};
    for (Target t : kAllTargets) header.emplace_back(slug(t));
    header.emplace_back("ties");
    header.emplace_back("support");
    out << csv::format_row(header) << '\n';
    for (const auto& v : votes) {
        csv::Row row = {v.comment_id};
        for (int c : v.labels.codes()) row.push_back(std::to_string(c));
        std::string ties, support;
        for (std::size_t t = 0; t < kNumTargets; ++t) {
            if (v.tie[t]) ties += (ties.empty() ? "" : ";") + std::string(slug(kAllTargets[t]));
            support += (t ? ";" : "") + std::to_string(v.support[t]);
        }
        row.push_back(ties);
        row.push_back(support);
        out << csv::format_row(row) << '\n';
    }
    return out.str();
}

nlohmann::json to_json(const AnnotationRecord& r) {
    return {{"annotator_id", r.annotator_id},
            {"comment_id", r.comment_id},
            {"labels", r.labels.codes()},
            {"submitted_at", r.submitted_at}};
}

AnnotationRecord record_from_json(const nlohmann::json& j) {
    if (!j.is_object()) raise(ErrorCode::ParseError, "annotation record must be an object");
    auto str = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_string()) {
            raise(ErrorCode::ParseError, std::string("annotation record needs string field '") + key + "'");
        }
        return j[key].get<std::string>();
    };
    AnnotationRecord r;
    r.annotator_id = str("annotator_id");
    r.comment_id = str("comment_id");
    const auto& labels = j.contains("labels") ? j["labels"] : nlohmann::json();
    std::array<int, kNumTargets> codes{};
    auto code = [](const nlohmann::json& v) {
        if (!v.is_number_integer()) raise(ErrorCode::InvalidLevel, "label codes must be integers in 0..3");
        return v.get<int>();
    };
    if (labels.is_array() && labels.size() == kNumTargets) {
        for (std::size_t i = 0; i < kNumTargets; ++i) codes[i] = code(labels[i]);
    } else if (labels.is_object()) {
        for (const auto& [key, value] : labels.items()) {
            const auto t = resolve_target(key);
            if (!t) raise(ErrorCode::UnknownTarget, key);
            codes[index_of(*t)] = code(value);
        }
    } else {
        raise(ErrorCode::ParseError, "annotation record needs 'labels': five integer codes or {slug: code}");
    }
    r.labels = LabelVector::from_codes(codes);
    if (j.contains("submitted_at") && j["submitted_at"].is_number_integer()) {
        r.submitted_at = j["submitted_at"].get<std::int64_t>();
    }
    return r;
}

nlohmann::json to_json(const AgreementReport& r) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : r.pairs) {
        nlohmann::json kappa = nlohmann::json::object();
        for (Target t : kAllTargets) kappa[std::string(slug(t))] = opt_json(p.kappa[index_of(t)]);
        pairs.push_back({{"first", p.first},
                         {"second", p.second},
                         {"overlap", p.overlap},
                         {"no_overlap", p.no_overlap()},
                         {"kappa", kappa}});
    }
    nlohmann::json means = nlohmann::json::object();
    nlohmann::json undefined = nlohmann::json::object();
    for (Target t : kAllTargets) {
        means[std::string(slug(t))] = opt_json(r.target_mean[index_of(t)]);
        undefined[std::string(slug(t))] = r.undefined_count[index_of(t)];
    }
    return {{"mode", r.mode == AgreementMode::WithLevels ? "with_levels" : "without_levels"},
            {"pairs", pairs},
            {"target_mean", means},
            {"undefined_count", undefined},
            {"no_overlap_pairs", r.no_overlap_pairs},
            {"overall", opt_json(r.overall)}};
}

nlohmann::json to_json(const VoteResult& v) {
    nlohmann::json ties = nlohmann::json::object();
    nlohmann::json support = nlohmann::json::object();
    nlohmann::json candidates = nlohmann::json::object();
    for (Target t : kAllTargets) {
        const auto i = index_of(t);
        ties[std::string(slug(t))] = v.tie[i];
        support[std::string(slug(t))] = v.support[i];
        nlohmann::json c = nlohmann::json::array();
        for (HatredLevel l : v.candidates[i]) c.push_back(code_of(l));
        candidates[std::string(slug(t))] = c;
    }
    return {{"comment_id", v.comment_id},
            {"labels", v.labels.codes()},
            {"tie", ties},
            {"support", support},
            {"candidates", candidates}};
}

nlohmann::json to_json(const GateOutcome& g) {
    return {{"status", status_name(g.status)},
            {"overall_kappa", g.overall_kappa},
            {"report", to_json(g.report)}};
}

}  // namespace vithsd::annotation
