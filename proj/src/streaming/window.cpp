#include "vithsd/streaming/window.hpp"

#include <sstream>

#include "vithsd/core/errors.hpp"

namespace vithsd::streaming {

std::uint64_t WindowAggregate::count(Target t, HatredLevel l) const {
    if (l == HatredLevel::Normal) return 0;
    return counts[index_of(t)][code_of(l) - 1];
}

std::uint64_t WindowAggregate::total() const noexcept {
    std::uint64_t n = 0;
    for (const auto& row : counts)
        for (auto c : row) n += c;
    return n;
}

std::int64_t window_start_of(std::int64_t ts_ms, std::int64_t width_ms) noexcept {
    std::int64_t q = ts_ms / width_ms;
    if (ts_ms % width_ms != 0 && ts_ms < 0) --q;
    return q * width_ms;
}

namespace {

void add_terms(WindowAggregate& w, const PredictionRecord& r) {
    for (const auto& t : r.terms) ++w.counts[index_of(t.target())][code_of(t.level()) - 1];
}

}  // namespace

std::vector<WindowAggregate> window_aggregate(std::span<const PredictionRecord> records, std::int64_t width_seconds) {
    if (width_seconds <= 0) raise(ErrorCode::InvalidConfig, "window width must be positive");
    const std::int64_t width_ms = width_seconds * 1000;
    std::map<std::int64_t, WindowAggregate> by_start;
    for (const auto& r : records) {
        if (r.terms.empty()) continue;
        const auto start = window_start_of(r.window_ts(), width_ms);
        auto& w = by_start[start];
        w.window_start = start;
        add_terms(w, r);
    }
    std::vector<WindowAggregate> out;
    out.reserve(by_start.size());
    for (auto& [_, w] : by_start) out.push_back(w);
    return out;
}

WindowAggregator::WindowAggregator(std::int64_t width_seconds, std::int64_t lateness_windows)
    : width_ms_(width_seconds * 1000), lateness_(lateness_windows) {
    if (width_seconds <= 0) raise(ErrorCode::InvalidConfig, "window width must be positive");
    if (lateness_windows < 1) raise(ErrorCode::InvalidConfig, "lateness must be at least one window");
}

bool WindowAggregator::add(const PredictionRecord& record) {
    const std::int64_t ts = record.window_ts();
    const std::int64_t start = window_start_of(ts, width_ms_);
    if (watermark_ && *watermark_ >= start + lateness_ * width_ms_) {
        late_.push_back(record);
        return false;
    }
    if (!watermark_ || ts > *watermark_) watermark_ = ts;
    if (record.terms.empty()) return true;
    auto& w = windows_[start];
    w.window_start = start;
    add_terms(w, record);
    return true;
}

std::vector<WindowAggregate> WindowAggregator::windows() const {
    std::vector<WindowAggregate> out;
    out.reserve(windows_.size());
    for (const auto& [_, w] : windows_) out.push_back(w);
    return out;
}

std::string windows_csv(std::span<const WindowAggregate> windows) {
    std::ostringstream os;
    os << "window_start,target,level,count\n";
    for (const auto& w : windows) {
        for (Target t : kAllTargets) {
            for (HatredLevel l : {HatredLevel::Clean, HatredLevel::Offensive, HatredLevel::Hate}) {
                os << w.window_start << ',' << slug(t) << ',' << level_name(l) << ',' << w.count(t, l) << '\n';
            }
        }
    }
    return os.str();
}

nlohmann::json to_json(std::span<const WindowAggregate> windows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& w : windows) {
        nlohmann::json cells = nlohmann::json::object();
        for (Target t : kAllTargets) {
            cells[std::string(slug(t))] = {{"clean", w.count(t, HatredLevel::Clean)},
                                           {"offensive", w.count(t, HatredLevel::Offensive)},
                                           {"hate", w.count(t, HatredLevel::Hate)}};
        }
        arr.push_back({{"window_start", w.window_start}, {"counts", cells}});
    }
    return arr;
}

}  // namespace vithsd::streaming
