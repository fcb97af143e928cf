#pragma once

#include <chrono>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vithsd/core/types.hpp"

namespace vithsd::streaming {

/// Pull-based comment source. next() blocks until the next comment is due
/// and returns nullopt at end of stream. Timestamps never decrease.
class SourceAdapter {
public:
    virtual ~SourceAdapter() = default;
    virtual std::optional<Comment> next() = 0;
    virtual std::string describe() const = 0;
};

/// Speed value meaning "emit as fast as consumed".
inline constexpr double kUnthrottled = std::numeric_limits<double>::infinity();

/// Reads newline-delimited {"id", "ts", "text"} records. Throws ParseError
/// naming the line for malformed records or a timestamp that goes backwards,
/// InvalidComment for blank text, IoError when unreadable.
std::vector<Comment> load_replay_file(const std::string& path);

/// Re-emits recorded comments keeping the original inter-arrival gaps
/// divided by `speed`.
class ReplaySource final : public SourceAdapter {
public:
    ReplaySource(std::vector<Comment> comments, double speed);
    static ReplaySource from_file(const std::string& path, double speed);

    std::optional<Comment> next() override;
    std::string describe() const override;
    std::size_t size() const noexcept { return comments_.size(); }

private:
    std::vector<Comment> comments_;
    double speed_;
    std::size_t pos_ = 0;
    std::optional<std::chrono::steady_clock::time_point> start_;
};

/// Live-platform polling configuration. Only the mock poller ships; a real
/// platform client would implement SourceAdapter against the same config.
struct PollingSourceConfig {
    std::string endpoint;  // "mock:<replay file>" for the bundled poller
    std::chrono::milliseconds interval{1000};
    std::string stream_id;
    std::size_t batch_size = 50;
};

/// Polls a backlog at a fixed interval and returns up to batch_size new
/// comments per poll; the backlog file stands in for the platform API.
/// Comments already seen (by id) are skipped.
class MockPoller final : public SourceAdapter {
public:
    MockPoller(PollingSourceConfig config, std::vector<Comment> backlog);
    static MockPoller from_config(const PollingSourceConfig& config);

    std::optional<Comment> next() override;
    std::string describe() const override;
    std::size_t polls() const noexcept { return polls_; }

private:
    void poll_once();

    PollingSourceConfig config_;
    std::vector<Comment> backlog_;
    std::size_t cursor_ = 0;
    std::vector<Comment> ready_;
    std::size_t ready_pos_ = 0;
    std::size_t polls_ = 0;
    std::vector<std::string> seen_;
    std::optional<std::chrono::steady_clock::time_point> last_poll_;
};

}  // namespace vithsd::streaming
