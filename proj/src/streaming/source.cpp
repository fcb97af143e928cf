#include "vithsd/streaming/source.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "vithsd/core/errors.hpp"

namespace vithsd::streaming {

std::vector<Comment> load_replay_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open replay file '" + path + "'");
    std::vector<Comment> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        Comment c;
        try {
            const auto j = nlohmann::json::parse(line);
            c.id = j.at("id").is_string() ? j["id"].get<std::string>() : j["id"].dump();
            c.timestamp_ms = j.at("ts").get<std::int64_t>();
            c.text = j.at("text").get<std::string>();
            c.source = j.value("source", std::string("replay"));
        } catch (const nlohmann::json::exception& e) {
            raise(ErrorCode::ParseError, where + ": " + e.what());
        }
        if (!out.empty() && *c.timestamp_ms < *out.back().timestamp_ms) {
            raise(ErrorCode::ParseError, where + ": timestamp " + std::to_string(*c.timestamp_ms) +
                                             " is earlier than the previous record");
        }
        try {
            validate_comment(c);
        } catch (const Error& e) {
            raise(ErrorCode::InvalidComment, where + ": " + e.what());
        }
        out.push_back(std::move(c));
    }
    return out;
}

ReplaySource::ReplaySource(std::vector<Comment> comments, double speed) : comments_(std::move(comments)), speed_(speed) {
    if (!(speed_ > 0.0)) raise(ErrorCode::InvalidConfig, "replay speed must be positive");
    for (std::size_t i = 1; i < comments_.size(); ++i) {
        if (comments_[i].timestamp_ms.value_or(0) < comments_[i - 1].timestamp_ms.value_or(0)) {
            raise(ErrorCode::ParseError, "replay comment " + comments_[i].id + " goes back in time");
        }
    }
}

ReplaySource ReplaySource::from_file(const std::string& path, double speed) {
    return ReplaySource(load_replay_file(path), speed);
}

std::optional<Comment> ReplaySource::next() {
    if (pos_ >= comments_.size()) return std::nullopt;
    const Comment& c = comments_[pos_];
    if (!std::isinf(speed_)) {
        const auto now = std::chrono::steady_clock::now();
        if (!start_) start_ = now;
        const std::int64_t t0 = comments_.front().timestamp_ms.value_or(0);
        const double offset_ms = static_cast<double>(c.timestamp_ms.value_or(t0) - t0) / speed_;
        const auto due = *start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                       std::chrono::duration<double, std::milli>(offset_ms));
        if (due > now) std::this_thread::sleep_until(due);
    }
    ++pos_;
    return c;
}

std::string ReplaySource::describe() const {
    return "replay(" + std::to_string(comments_.size()) + " comments, speed " +
           (std::isinf(speed_) ? std::string("unthrottled") : std::to_string(speed_)) + ")";
}

MockPoller::MockPoller(PollingSourceConfig config, std::vector<Comment> backlog)
    : config_(std::move(config)), backlog_(std::move(backlog)) {
    if (config_.batch_size == 0) raise(ErrorCode::InvalidConfig, "poller batch size must be positive");
    if (config_.interval.count() < 0) raise(ErrorCode::InvalidConfig, "poller interval must not be negative");
}

MockPoller MockPoller::from_config(const PollingSourceConfig& config) {
    const std::string prefix = "mock:";
    if (config.endpoint.rfind(prefix, 0) != 0) {
        raise(ErrorCode::InvalidConfig, "only mock:<file> polling endpoints are available, got '" + config.endpoint + "'");
    }
    return MockPoller(config, load_replay_file(config.endpoint.substr(prefix.size())));
}

void MockPoller::poll_once() {
    const auto now = std::chrono::steady_clock::now();
    if (last_poll_) {
        const auto due = *last_poll_ + config_.interval;
        if (due > now) std::this_thread::sleep_until(due);
    }
    last_poll_ = std::chrono::steady_clock::now();
    ++polls_;
    ready_.clear();
    ready_pos_ = 0;
    while (cursor_ < backlog_.size() && ready_.size() < config_.batch_size) {
        const Comment& c = backlog_[cursor_++];
        if (std::find(seen_.begin(), seen_.end(), c.id) != seen_.end()) continue;
        seen_.push_back(c.id);
        Comment copy = c;
        if (!config_.stream_id.empty()) copy.source = config_.stream_id;
        ready_.push_back(std::move(copy));
    }
}

std::optional<Comment> MockPoller::next() {
    while (ready_pos_ >= ready_.size()) {
        if (cursor_ >= backlog_.size()) return std::nullopt;
        poll_once();
    }
    return ready_[ready_pos_++];
}

std::string MockPoller::describe() const {
    return "poll(" + config_.endpoint + ", every " + std::to_string(config_.interval.count()) + " ms, stream '" +
           config_.stream_id + "')";
}

}  // namespace vithsd::streaming
