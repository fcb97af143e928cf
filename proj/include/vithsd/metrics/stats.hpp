#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vithsd/core/types.hpp"

namespace vithsd::metrics {

struct LengthSummary {
    std::size_t min = 0;
    std::size_t q25 = 0;
    std::size_t median = 0;
    double mean = 0.0;
    std::size_t q75 = 0;
    std::size_t max = 0;
};

/// Nearest-rank percentile of an ascending list: element at rank ceil(p*N),
/// clamped to [1, N]. Throws EmptyInput on an empty list.
std::size_t nearest_rank(std::span<const std::size_t> sorted, double p);

struct DatasetStats {
    std::size_t count = 0;
    std::size_t vocab_size = 0;
    double avg_length = 0.0;
    LengthSummary length;
    /// histogram[k] = comments mentioning exactly k targets.
    std::array<std::size_t, kNumTargets + 1> target_histogram{};
    /// Comments with the target at a non-Normal level.
    std::array<std::size_t, kNumTargets> target_counts{};
    /// [target][level code]; index 0 counts Normal.
    std::array<std::array<std::size_t, kNumLevels>, kNumTargets> level_counts{};
};

/// Lengths and vocabulary use the statistics tokenizer on the raw text.
DatasetStats dataset_stats(std::span<const LabeledComment> dataset);

nlohmann::json to_json(const DatasetStats& s);

/// One column per named split: overview, length distribution, targets per
/// comment, and per-target level counts.
std::string format_stats_table(const std::vector<std::pair<std::string, DatasetStats>>& splits);

/// Reference values for a split; unset fields are not checked.
struct ExpectedStats {
    std::optional<std::size_t> count;
    std::optional<std::size_t> min, q25, median, q75, max;
    std::optional<std::array<std::size_t, kNumTargets>> target_counts;
    std::optional<std::array<std::array<std::size_t, kNumLevels>, kNumTargets>> level_counts;

    static ExpectedStats from_json(const nlohmann::json& j);
};

struct Divergence {
    std::string field;
    double expected = 0.0;
    double actual = 0.0;
};

std::vector<Divergence> compare_stats(const DatasetStats& actual, const ExpectedStats& expected);
std::string format_divergences(const std::string& split, const std::vector<Divergence>& d);

}  // namespace vithsd::metrics
