#include "vithsd/streaming/latency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "vithsd/core/errors.hpp"

namespace vithsd::streaming {

namespace {

double rank(const std::vector<double>& sorted, double p) {
    auto r = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
    r = std::clamp<std::size_t>(r, 1, sorted.size());
    return sorted[r - 1];
}

}  // namespace

LatencyStats latency_stats(const std::string& model, std::vector<double> samples) {
    if (samples.empty()) raise(ErrorCode::EmptyInput, "no latency samples for model '" + model + "'");
    std::sort(samples.begin(), samples.end());
    LatencyStats s;
    s.model = model;
    s.count = samples.size();
    s.min = samples.front();
    s.q25 = rank(samples, 0.25);
    s.median = rank(samples, 0.5);
    s.q75 = rank(samples, 0.75);
    s.max = samples.back();
    s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    // Rounding in the sum can push the mean a hair outside the range.
    s.mean = std::clamp(s.mean, s.min, s.max);
    return s;
}

LatencyReport latency_report(std::span<const PredictionRecord> records) {
    if (records.empty()) raise(ErrorCode::EmptyInput, "latency report over no records");
    std::map<std::string, std::vector<double>> by_model;
    for (const auto& r : records) by_model[r.model].push_back(r.latency_ms);
    LatencyReport rep;
    for (auto& [model, samples] : by_model) rep.rows.push_back(latency_stats(model, std::move(samples)));
    return rep;
}

std::string format_latency_table(const LatencyReport& r) {
    std::size_t w = 5;
    for (const auto& row : r.rows) w = std::max(w, row.model.size());
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s %10s %10s %10s %10s %10s %10s\n", static_cast<int>(w), "Model", "Min", "25%",
                  "Median", "Mean", "75%", "Max");
    out += buf;
    for (const auto& row : r.rows) {
        std::snprintf(buf, sizeof buf, "%-*s %10.3f %10.3f %10.3f %10.3f %10.3f %10.3f\n", static_cast<int>(w),
                      row.model.c_str(), row.min, row.q25, row.median, row.mean, row.q75, row.max);
        out += buf;
    }
    return out;
}

nlohmann::json to_json(const LatencyReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : r.rows) {
        rows.push_back({{"model", s.model},
                        {"count", s.count},
                        {"min", s.min},
                        {"q25", s.q25},
                        {"median", s.median},
                        {"mean", s.mean},
                        {"q75", s.q75},
                        {"max", s.max}});
    }
    return {{"unit", "ms"}, {"models", rows}};
}

}  // namespace vithsd::streaming
