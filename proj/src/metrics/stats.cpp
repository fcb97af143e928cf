#include "vithsd/metrics/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_set>

#include "vithsd/core/errors.hpp"
#include "vithsd/core/text.hpp"

namespace vithsd::metrics {

std::size_t nearest_rank(std::span<const std::size_t> sorted, double p) {
    if (sorted.empty()) raise(ErrorCode::EmptyInput, "percentile of an empty list");
    const double n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(p * n));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

DatasetStats dataset_stats(std::span<const LabeledComment> dataset) {
    DatasetStats s;
    s.count = dataset.size();
    std::unordered_set<std::string> vocab;
    std::vector<std::size_t> lengths;
    lengths.reserve(dataset.size());
    std::size_t total = 0;
    for (const auto& lc : dataset) {
        auto tokens = tokenize(lc.comment.text);
        lengths.push_back(tokens.size());
        total += tokens.size();
        for (auto& tok : tokens) vocab.insert(std::move(tok));
        ++s.target_histogram[lc.labels.mentioned_count()];
        for (Target t : kAllTargets) {
            const int code = code_of(lc.labels[t]);
            ++s.level_counts[index_of(t)][code];
            if (code != 0) ++s.target_counts[index_of(t)];
        }
    }
    s.vocab_size = vocab.size();
    if (!lengths.empty()) {
        std::sort(lengths.begin(), lengths.end());
        s.avg_length = static_cast<double>(total) / static_cast<double>(lengths.size());
        s.length.min = lengths.front();
        s.length.q25 = nearest_rank(lengths, 0.25);
        s.length.median = nearest_rank(lengths, 0.5);
        s.length.mean = s.avg_length;
        s.length.q75 = nearest_rank(lengths, 0.75);
        s.length.max = lengths.back();
    }
    return s;
}

nlohmann::json to_json(const DatasetStats& s) {
    nlohmann::json per_target = nlohmann::json::object();
    for (Target t : kAllTargets) {
        const auto& lv = s.level_counts[index_of(t)];
        per_target[std::string(slug(t))] = {{"comments", s.target_counts[index_of(t)]},
                                            {"normal", lv[0]},
                                            {"clean", lv[1]},
                                            {"offensive", lv[2]},
                                            {"hate", lv[3]}};
    }
    return {{"count", s.count},
            {"vocab_size", s.vocab_size},
            {"avg_length", s.avg_length},
            {"length",
             {{"min", s.length.min},
              {"q25", s.length.q25},
              {"median", s.length.median},
              {"mean", s.length.mean},
              {"q75", s.length.q75},
              {"max", s.length.max}}},
            {"target_histogram", s.target_histogram},
            {"targets", per_target}};
}

std::string format_stats_table(const std::vector<std::pair<std::string, DatasetStats>>& splits) {
    std::ostringstream os;
    constexpr int label_w = 28;
    constexpr int col_w = 12;
    auto pad_left = [](const std::string& s, std::size_t w) {
        return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
    };
    auto pad_right = [](const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); };
    auto row = [&](const std::string& label, auto&& cell) {
        os << pad_right(label, label_w);
        for (const auto& [name, st] : splits) os << pad_left(cell(st), col_w);
        os << '\n';
    };
    auto num = [](auto v) { return std::to_string(v); };
    auto real = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    os << pad_right("", label_w);
    for (const auto& [name, st] : splits) os << pad_left(name, col_w);
    os << '\n';
    row("comments", [&](const DatasetStats& st) { return num(st.count); });
    row("vocabulary size", [&](const DatasetStats& st) { return num(st.vocab_size); });
    row("average length", [&](const DatasetStats& st) { return real(st.avg_length); });

    os << "\nlength distribution (tokens)\n";
    row("  min", [&](const DatasetStats& st) { return num(st.length.min); });
    row("  25%", [&](const DatasetStats& st) { return num(st.length.q25); });
    row("  median", [&](const DatasetStats& st) { return num(st.length.median); });
    row("  mean", [&](const DatasetStats& st) { return real(st.length.mean); });
    row("  75%", [&](const DatasetStats& st) { return num(st.length.q75); });
    row("  max", [&](const DatasetStats& st) { return num(st.length.max); });

    os << "\ntargets per comment\n";
    for (std::size_t k = 0; k <= kNumTargets; ++k) {
        row("  " + std::to_string(k), [&](const DatasetStats& st) { return num(st.target_histogram[k]); });
    }

    os << "\ncomments per target\n";
    for (Target t : kAllTargets) {
        const std::size_t i = index_of(t);
        row("  " + std::string(slug(t)), [&](const DatasetStats& st) { return num(st.target_counts[i]); });
        for (HatredLevel l : {HatredLevel::Clean, HatredLevel::Offensive, HatredLevel::Hate}) {
            row("    " + std::string(level_name(l)),
                [&](const DatasetStats& st) { return num(st.level_counts[i][code_of(l)]); });
        }
    }
    return os.str();
}

ExpectedStats ExpectedStats::from_json(const nlohmann::json& j) {
    ExpectedStats e;
    auto opt = [&](const char* key, std::optional<std::size_t>& dst) {
        if (j.contains(key)) dst = j.at(key).get<std::size_t>();
    };
    try {
        opt("count", e.count);
        opt("min", e.min);
        opt("q25", e.q25);
        opt("median", e.median);
        opt("q75", e.q75);
        opt("max", e.max);
        if (j.contains("target_counts")) {
            std::array<std::size_t, kNumTargets> tc{};
            for (const auto& [key, value] : j.at("target_counts").items()) {
                const auto t = resolve_target(key);
                if (!t) raise(ErrorCode::UnknownTarget, key);
                tc[index_of(*t)] = value.get<std::size_t>();
            }
            e.target_counts = tc;
        }
    } catch (const nlohmann::json::exception& ex) {
        raise(ErrorCode::SchemaError, std::string("expected-stats file: ") + ex.what());
    }
    return e;
}

std::vector<Divergence> compare_stats(const DatasetStats& a, const ExpectedStats& e) {
    std::vector<Divergence> out;
    auto check = [&](const std::string& field, const std::optional<std::size_t>& want, std::size_t got) {
        if (want && *want != got) out.push_back({field, static_cast<double>(*want), static_cast<double>(got)});
    };
    check("count", e.count, a.count);
    check("length.min", e.min, a.length.min);
    check("length.q25", e.q25, a.length.q25);
    check("length.median", e.median, a.length.median);
    check("length.q75", e.q75, a.length.q75);
    check("length.max", e.max, a.length.max);
    for (Target t : kAllTargets) {
        const std::size_t i = index_of(t);
        if (e.target_counts) check("targets." + std::string(slug(t)), (*e.target_counts)[i], a.target_counts[i]);
        if (e.level_counts) {
            for (HatredLevel l : kAllLevels) {
                check("targets." + std::string(slug(t)) + "." + std::string(level_name(l)),
                      (*e.level_counts)[i][code_of(l)], a.level_counts[i][code_of(l)]);
            }
        }
    }
    return out;
}

std::string format_divergences(const std::string& split, const std::vector<Divergence>& d) {
    std::ostringstream os;
    if (d.empty()) {
        os << split << ": matches reference\n";
        return os.str();
    }
    os << split << ": " << d.size() << " field(s) diverge\n";
    for (const auto& x : d) {
        os << "  " << x.field << ": expected " << x.expected << ", got " << x.actual << " (delta "
           << (x.actual - x.expected) << ")\n";
    }
    return os.str();
}

}  // namespace vithsd::metrics
