#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vithsd/streaming/records.hpp"

namespace vithsd::streaming {

struct LatencyStats {
    std::string model;
    std::size_t count = 0;
    double min = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double mean = 0.0;
    double q75 = 0.0;
    double max = 0.0;
};

struct LatencyReport {
    std::vector<LatencyStats> rows;  // one per model, sorted by model id
};

/// Nearest-rank quartiles and arithmetic mean of latency_ms per model.
/// Throws EmptyInput when there are no records.
LatencyReport latency_report(std::span<const PredictionRecord> records);
LatencyStats latency_stats(const std::string& model, std::vector<double> samples);

/// Model | Min | 25% | Median | Mean | 75% | Max, milliseconds.
std::string format_latency_table(const LatencyReport& r);
nlohmann::json to_json(const LatencyReport& r);

}  // namespace vithsd::streaming
