#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vithsd/streaming/records.hpp"

namespace vithsd::streaming {

inline constexpr std::int64_t kDefaultWindowSeconds = 60;

struct WindowAggregate {
    std::int64_t window_start = 0;  // epoch ms, a multiple of the window width
    /// [target][level code - 1] for Clean, Offensive, Hate.
    std::array<std::array<std::uint64_t, 3>, kNumTargets> counts{};

    std::uint64_t count(Target t, HatredLevel l) const;
    std::uint64_t total() const noexcept;
    friend bool operator==(const WindowAggregate&, const WindowAggregate&) = default;
};

/// Floor of ts to a multiple of width_ms, correct for negative timestamps.
std::int64_t window_start_of(std::int64_t ts_ms, std::int64_t width_ms) noexcept;

/// Offline tumbling-window counts over every record, ascending by start.
/// Only windows holding at least one term are returned.
std::vector<WindowAggregate> window_aggregate(std::span<const PredictionRecord> records,
                                              std::int64_t width_seconds = kDefaultWindowSeconds);

/// Incremental form used by the pipeline. The watermark is the largest event
/// time seen so far. A record is late, and goes to the side channel instead of
/// its window, when watermark >= window start + lateness_windows * width.
class WindowAggregator {
public:
    explicit WindowAggregator(std::int64_t width_seconds = kDefaultWindowSeconds, std::int64_t lateness_windows = 2);

    /// Returns false when the record was diverted as late.
    bool add(const PredictionRecord& record);

    std::vector<WindowAggregate> windows() const;
    const std::vector<PredictionRecord>& late() const noexcept { return late_; }
    std::optional<std::int64_t> watermark() const noexcept { return watermark_; }
    std::int64_t width_ms() const noexcept { return width_ms_; }

private:
    std::int64_t width_ms_;
    std::int64_t lateness_;
    std::optional<std::int64_t> watermark_;
    std::map<std::int64_t, WindowAggregate> windows_;
    std::vector<PredictionRecord> late_;
};

/// CSV with header window_start,target,level,count; one row per window and
/// (target, level) cell, zeros included.
std::string windows_csv(std::span<const WindowAggregate> windows);
nlohmann::json to_json(std::span<const WindowAggregate> windows);

}  // namespace vithsd::streaming
