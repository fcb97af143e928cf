#include "vithsd/streaming/bus.hpp"

#include <algorithm>

#include <json.hpp>

#include "vithsd/core/errors.hpp"

namespace vithsd::streaming {

std::uint64_t key_hash(std::string_view key) noexcept {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : key) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

std::int64_t now_us() {
    return std::chrono::duration_cast<std::chrono::microseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace

LogBroker::LogBroker(const std::string& journal_path) {
    replay(journal_path);
    journal_ = std::make_unique<std::ofstream>(journal_path, std::ios::app | std::ios::binary);
    if (!*journal_) raise(ErrorCode::IoError, "cannot open bus journal '" + journal_path + "'");
}

LogBroker::~LogBroker() = default;

void LogBroker::replay(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            // A torn final line from a crash mid-append is dropped.
            if (in.peek() == std::char_traits<char>::eof()) break;
            raise(ErrorCode::ParseError, "bus journal line " + std::to_string(lineno) + " is not JSON");
        }
        const std::string op = j.value("op", "");
        if (op == "topic") {
            topics_[j["name"]].partitions.resize(j["partitions"].get<std::uint32_t>());
        } else if (op == "pub") {
            append_locked(j["topic"], j["partition"], j["key"], j["payload"], j["ingest_us"], false);
        } else if (op == "group") {
            group_locked(j["group"], j["topic"]);
        } else if (op == "commit") {
            auto& g = group_locked(j["group"], j["topic"]);
            const std::uint32_t p = j["partition"];
            const std::uint64_t next = j["offset"].get<std::uint64_t>() + 1;
            g.next.at(p) = std::max(g.next.at(p), next);
            g.delivered.at(p) = std::max(g.delivered.at(p), g.next.at(p));
        } else {
            raise(ErrorCode::ParseError, "bus journal line " + std::to_string(lineno) + " has unknown op");
        }
    }
}

void LogBroker::journal_locked(const std::string& line) {
    if (!journal_) return;
    (*journal_) << line << '\n';
    journal_->flush();
    if (!*journal_) raise(ErrorCode::IoError, "bus journal write failed");
}

LogBroker::Topic& LogBroker::topic_locked(const std::string& name) {
    auto it = topics_.find(name);
    if (it == topics_.end()) raise(ErrorCode::UnknownTopic, name);
    return it->second;
}

const LogBroker::Topic& LogBroker::topic_locked(const std::string& name) const {
    auto it = topics_.find(name);
    if (it == topics_.end()) raise(ErrorCode::UnknownTopic, name);
    return it->second;
}

LogBroker::GroupState& LogBroker::group_locked(const std::string& group, const std::string& topic) {
    const auto& t = topic_locked(topic);
    auto& g = groups_[{group, topic}];
    g.next.resize(t.partitions.size(), 0);
    g.delivered.resize(t.partitions.size(), 0);
    return g;
}

TopicHandle LogBroker::create_topic(const std::string& name, std::uint32_t partitions) {
    if (partitions == 0) raise(ErrorCode::InvalidConfig, "topic '" + name + "' needs at least one partition");
    if (name.empty()) raise(ErrorCode::InvalidConfig, "topic name is empty");
    std::lock_guard lock(mu_);
    if (topics_.count(name)) raise(ErrorCode::TopicExists, name);
    topics_[name].partitions.resize(partitions);
    journal_locked(nlohmann::json{{"op", "topic"}, {"name", name}, {"partitions", partitions}}.dump());
    return {name, partitions};
}

std::optional<TopicHandle> LogBroker::topic(const std::string& name) const {
    std::lock_guard lock(mu_);
    auto it = topics_.find(name);
    if (it == topics_.end()) return std::nullopt;
    return TopicHandle{name, static_cast<std::uint32_t>(it->second.partitions.size())};
}

PublishResult LogBroker::append_locked(const std::string& topic, std::uint32_t partition, const std::string& key,
                                       const std::string& payload, std::int64_t ingest_us, bool journal) {
    auto& t = topic_locked(topic);
    if (partition >= t.partitions.size()) {
        raise(ErrorCode::InvalidConfig, "topic '" + topic + "' has no partition " + std::to_string(partition));
    }
    auto& part = t.partitions[partition];
    BusMessage m;
    m.topic = topic;
    m.partition = partition;
    m.offset = part.size();
    m.key = key;
    m.payload = payload;
    m.ingest_us = ingest_us;
    m.ingest_ts = ingest_us / 1000;
    if (journal) {
        journal_locked(nlohmann::json{{"op", "pub"},
                                      {"topic", topic},
                                      {"partition", partition},
                                      {"key", key},
                                      {"payload", payload},
                                      {"ingest_us", ingest_us}}
                           .dump());
    }
    part.push_back(std::move(m));
    return {partition, part.back().offset};
}

PublishResult LogBroker::publish(const std::string& topic, const std::string& key, const std::string& payload) {
    PublishResult r;
    {
        std::lock_guard lock(mu_);
        const auto& t = topic_locked(topic);
        const auto p = static_cast<std::uint32_t>(key_hash(key) % t.partitions.size());
        r = append_locked(topic, p, key, payload, now_us(), true);
    }
    cv_.notify_all();
    return r;
}

PublishResult LogBroker::publish_to(const std::string& topic, std::uint32_t partition, const std::string& key,
                                    const std::string& payload) {
    PublishResult r;
    {
        std::lock_guard lock(mu_);
        r = append_locked(topic, partition, key, payload, now_us(), true);
    }
    cv_.notify_all();
    return r;
}

void LogBroker::register_group(const std::string& group, const std::string& topic) {
    if (group.empty()) raise(ErrorCode::InvalidConfig, "consumer group id is empty");
    std::lock_guard lock(mu_);
    const bool fresh = !groups_.count({group, topic});
    group_locked(group, topic);
    if (fresh) journal_locked(nlohmann::json{{"op", "group"}, {"group", group}, {"topic", topic}}.dump());
}

std::vector<BusMessage> LogBroker::poll(const std::string& group, const std::string& topic, std::size_t max,
                                        const std::vector<std::uint32_t>* partitions,
                                        std::chrono::milliseconds wait) {
    std::unique_lock lock(mu_);
    const auto key = std::make_pair(group, topic);
    if (!groups_.count(key)) raise(ErrorCode::UnknownGroup, group + " on " + topic);

    std::vector<std::uint32_t> parts;
    const auto& t = topic_locked(topic);
    if (partitions) {
        parts = *partitions;
        for (auto p : parts) {
            if (p >= t.partitions.size()) raise(ErrorCode::InvalidConfig, "no partition " + std::to_string(p));
        }
    } else {
        for (std::uint32_t p = 0; p < t.partitions.size(); ++p) parts.push_back(p);
    }

    auto pending = [&] {
        const auto& g = groups_.at(key);
        const auto& tp = topics_.at(topic);
        for (auto p : parts) {
            if (g.next[p] < tp.partitions[p].size()) return true;
        }
        return false;
    };
    if (wait.count() > 0 && !pending()) cv_.wait_for(lock, wait, pending);

    std::vector<BusMessage> out;
    auto& g = groups_.at(key);
    const auto& tp = topics_.at(topic);
    for (auto p : parts) {
        const auto& log = tp.partitions[p];
        for (std::uint64_t o = g.next[p]; o < log.size() && out.size() < max; ++o) {
            out.push_back(log[o]);
            g.delivered[p] = std::max(g.delivered[p], o + 1);
        }
        if (out.size() >= max) break;
    }
    return out;
}

void LogBroker::commit(const std::string& group, const std::string& topic, std::uint32_t partition,
                       std::uint64_t offset) {
    std::lock_guard lock(mu_);
    auto it = groups_.find({group, topic});
    if (it == groups_.end()) raise(ErrorCode::UnknownGroup, group + " on " + topic);
    auto& g = it->second;
    if (partition >= g.next.size()) {
        raise(ErrorCode::InvalidCommit, "no partition " + std::to_string(partition) + " in " + topic);
    }
    if (offset >= g.delivered[partition]) {
        raise(ErrorCode::InvalidCommit, "offset " + std::to_string(offset) + " of " + topic + "/" +
                                            std::to_string(partition) + " was not delivered to " + group);
    }
    if (offset + 1 <= g.next[partition]) return;
    g.next[partition] = offset + 1;
    journal_locked(nlohmann::json{
        {"op", "commit"}, {"group", group}, {"topic", topic}, {"partition", partition}, {"offset", offset}}
                       .dump());
}

std::optional<std::uint64_t> LogBroker::committed(const std::string& group, const std::string& topic,
                                                  std::uint32_t partition) const {
    std::lock_guard lock(mu_);
    auto it = groups_.find({group, topic});
    if (it == groups_.end()) raise(ErrorCode::UnknownGroup, group + " on " + topic);
    const auto next = it->second.next.at(partition);
    if (next == 0) return std::nullopt;
    return next - 1;
}

std::uint64_t LogBroker::end_offset(const std::string& topic, std::uint32_t partition) const {
    std::lock_guard lock(mu_);
    return topic_locked(topic).partitions.at(partition).size();
}

std::vector<BusMessage> LogBroker::read(const std::string& topic, std::uint32_t partition) const {
    std::lock_guard lock(mu_);
    return topic_locked(topic).partitions.at(partition);
}

}  // namespace vithsd::streaming
