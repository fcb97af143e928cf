#include "vithsd/metrics/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vithsd/core/errors.hpp"
#include "vithsd/core/labels.hpp"

namespace vithsd::metrics {

EvaluationReport evaluate(const std::string& model, std::span<const LabelVector> preds,
                          std::span<const LabelVector> golds, unsigned threads) {
    EvaluationReport r;
    r.model = model;
    r.comments = golds.size();
    r.confusion = per_target_confusion(preds, golds);
    std::vector<TermList> p, g;
    p.reserve(preds.size());
    g.reserve(golds.size());
    for (const auto& v : preds) p.push_back(label_vector_to_terms(v));
    for (const auto& v : golds) g.push_back(label_vector_to_terms(v));
    const auto only = count_matches(p, g, EvalTask::TargetOnly, threads);
    const auto level = count_matches(p, g, EvalTask::TargetLevel, threads);
    r.target_only_micro = make_report(only, EvalTask::TargetOnly, Aggregation::Micro, r.comments);
    r.target_only_macro = make_report(only, EvalTask::TargetOnly, Aggregation::Macro, r.comments);
    r.target_level_micro = make_report(level, EvalTask::TargetLevel, Aggregation::Micro, r.comments);
    r.target_level_macro = make_report(level, EvalTask::TargetLevel, Aggregation::Macro, r.comments);
    return r;
}

std::vector<IdTerms> load_prediction_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open predictions '" + path + "'");
    std::vector<IdTerms> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        IdTerms item;
        try {
            const auto j = nlohmann::json::parse(line);
            item.id = j.at("id").is_string() ? j["id"].get<std::string>() : j["id"].dump();
            std::string list = "[";
            for (const auto& t : j.at("terms")) list += t.get<std::string>() + ",";
            list += "]";
            item.terms = parse_label_list(list);
        } catch (const nlohmann::json::exception& e) {
            raise(ErrorCode::ParseError, where + ": " + e.what());
        } catch (const Error& e) {
            raise(e.code(), where + ": " + e.what());
        }
        out.push_back(std::move(item));
    }
    return out;
}

EvaluationReport evaluate_predictions(const std::string& model, std::span<const IdTerms> preds,
                                      std::span<const LabeledComment> golds, unsigned threads) {
    std::vector<IdTerms> gold_terms;
    gold_terms.reserve(golds.size());
    for (const auto& g : golds) gold_terms.push_back({g.comment.id, label_vector_to_terms(g.labels)});
    const auto aligned = align_by_id(preds, gold_terms);
    std::vector<LabelVector> p, g;
    p.reserve(aligned.size());
    g.reserve(golds.size());
    for (const auto& a : aligned) p.push_back(terms_to_label_vector(a.terms));
    for (const auto& x : golds) g.push_back(x.labels);
    return evaluate(model, p, g, threads);
}

namespace {

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%6.2f", 100.0 * v);
    return buf;
}

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }

}  // namespace

std::string format_table(const EvaluationReport& r) {
    std::size_t w = 5;
    const std::string micro_name = r.model + " (micro)";
    const std::string macro_name = r.model + " (macro)";
    w = std::max({w, micro_name.size(), macro_name.size()});

    std::ostringstream os;
    os << pad("", w) << " | " << pad("Target only", 20) << " | " << "Target + level\n";
    os << pad("Model", w) << " | " << "    F1      P      R" << " | " << "    F1      P      R\n";
    os << std::string(w, '-') << "-+-" << std::string(20, '-') << "-+-" << std::string(20, '-') << "\n";
    auto row = [&](const std::string& name, const PRFReport& a, const PRFReport& b) {
        os << pad(name, w) << " | " << pct(a.f1) << " " << pct(a.precision) << " " << pct(a.recall) << " | "
           << pct(b.f1) << " " << pct(b.precision) << " " << pct(b.recall) << "\n";
    };
    row(micro_name, r.target_only_micro, r.target_level_micro);
    row(macro_name, r.target_only_macro, r.target_level_macro);
    os << "comments: " << r.comments << "\n";
    return os.str();
}

std::string format_confusion(const ConfusionMatrix& m) {
    std::ostringstream os;
    for (Target t : kAllTargets) {
        os << slug(t) << " (rows gold, columns predicted)\n";
        os << pad("", 10);
        for (HatredLevel l : kAllLevels) os << pad(std::string(level_name(l)), 10);
        os << "\n";
        for (HatredLevel g : kAllLevels) {
            os << pad(std::string(level_name(g)), 10);
            for (HatredLevel p : kAllLevels) os << pad(std::to_string(m.at(t, g, p)), 10);
            os << "\n";
        }
    }
    return os.str();
}

nlohmann::json to_json(const PRFReport& r) {
    nlohmann::json per_target = nlohmann::json::object();
    for (Target t : kAllTargets) {
        const auto& p = r.per_target[index_of(t)];
        const auto& c = r.per_target_counts[index_of(t)];
        per_target[std::string(slug(t))] = {{"precision", p.precision},
                                            {"recall", p.recall},
                                            {"f1", p.f1},
                                            {"matched", c.matched},
                                            {"predicted", c.predicted},
                                            {"gold", c.gold}};
    }
    return {{"task", task_name(r.task)},
            {"aggregation", aggregation_name(r.mode)},
            {"precision", r.precision},
            {"recall", r.recall},
            {"f1", r.f1},
            {"matched", r.total.matched},
            {"predicted", r.total.predicted},
            {"gold", r.total.gold},
            {"comments", r.comments},
            {"per_target", per_target}};
}

nlohmann::json to_json(const ConfusionMatrix& m) {
    nlohmann::json j = nlohmann::json::object();
    for (Target t : kAllTargets) j[std::string(slug(t))] = m.counts[index_of(t)];
    return j;
}

nlohmann::json to_json(const EvaluationReport& r) {
    return {{"model", r.model},
            {"comments", r.comments},
            {"target_only", {{"micro", to_json(r.target_only_micro)}, {"macro", to_json(r.target_only_macro)}}},
            {"target_level", {{"micro", to_json(r.target_level_micro)}, {"macro", to_json(r.target_level_macro)}}},
            {"confusion", to_json(r.confusion)}};
}

}  // namespace vithsd::metrics
