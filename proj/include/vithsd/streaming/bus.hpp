#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vithsd::streaming {

struct BusMessage {
    std::string topic;
    std::uint32_t partition = 0;
    std::uint64_t offset = 0;
    std::string key;
    std::string payload;
    std::int64_t ingest_ts = 0;  // epoch ms
    std::int64_t ingest_us = 0;  // epoch us, for latency arithmetic
};

struct TopicHandle {
    std::string name;
    std::uint32_t partitions = 0;
};

struct PublishResult {
    std::uint32_t partition = 0;
    std::uint64_t offset = 0;
};

/// Stable key hash used for partition routing (FNV-1a, 64 bit).
std::uint64_t key_hash(std::string_view key) noexcept;

/// The seam where an external log broker would plug in. Offsets are per
/// partition, gapless from 0. A group's committed offset is the last offset
/// it has finished; polls resume right after it, so anything delivered but
/// not committed is delivered again.
class Broker {
public:
    virtual ~Broker() = default;

    virtual TopicHandle create_topic(const std::string& name, std::uint32_t partitions) = 0;
    virtual std::optional<TopicHandle> topic(const std::string& name) const = 0;

    /// Routes by key_hash(key) % partitions.
    virtual PublishResult publish(const std::string& topic, const std::string& key, const std::string& payload) = 0;
    /// Explicit partition, used to keep a derived stream co-partitioned with its input.
    virtual PublishResult publish_to(const std::string& topic, std::uint32_t partition, const std::string& key,
                                     const std::string& payload) = 0;

    /// Idempotent: registering an existing group is a no-op.
    virtual void register_group(const std::string& group, const std::string& topic) = 0;

    /// Up to `max` messages past the committed offsets, partition by partition
    /// in ascending partition order, each partition in offset order. When
    /// `partitions` is given only those are read. Waits up to `wait` for data
    /// when nothing is pending.
    virtual std::vector<BusMessage> poll(const std::string& group, const std::string& topic, std::size_t max,
                                         const std::vector<std::uint32_t>* partitions = nullptr,
                                         std::chrono::milliseconds wait = std::chrono::milliseconds(0)) = 0;

    /// Marks `offset` done. Throws InvalidCommit when the offset was never
    /// delivered to the group. Committing below the current point is a no-op.
    virtual void commit(const std::string& group, const std::string& topic, std::uint32_t partition,
                        std::uint64_t offset) = 0;

    /// Last committed offset, or nullopt if nothing committed yet.
    virtual std::optional<std::uint64_t> committed(const std::string& group, const std::string& topic,
                                                   std::uint32_t partition) const = 0;
    /// Number of messages in the partition (next offset to assign).
    virtual std::uint64_t end_offset(const std::string& topic, std::uint32_t partition) const = 0;

    /// Non-consuming read of a whole partition, for inspection and tests.
    virtual std::vector<BusMessage> read(const std::string& topic, std::uint32_t partition) const = 0;
};

/// In-process partitioned log. Thread-safe. With a journal path, every
/// topic creation, publish, group registration and commit is appended to the
/// file, and constructing a broker over an existing journal restores that
/// state (delivery positions restart at the committed offsets).
class LogBroker final : public Broker {
public:
    LogBroker() = default;
    explicit LogBroker(const std::string& journal_path);
    ~LogBroker() override;

    TopicHandle create_topic(const std::string& name, std::uint32_t partitions) override;
    std::optional<TopicHandle> topic(const std::string& name) const override;
    PublishResult publish(const std::string& topic, const std::string& key, const std::string& payload) override;
    PublishResult publish_to(const std::string& topic, std::uint32_t partition, const std::string& key,
                             const std::string& payload) override;
    void register_group(const std::string& group, const std::string& topic) override;
    std::vector<BusMessage> poll(const std::string& group, const std::string& topic, std::size_t max,
                                 const std::vector<std::uint32_t>* partitions = nullptr,
                                 std::chrono::milliseconds wait = std::chrono::milliseconds(0)) override;
    void commit(const std::string& group, const std::string& topic, std::uint32_t partition,
                std::uint64_t offset) override;
    std::optional<std::uint64_t> committed(const std::string& group, const std::string& topic,
                                           std::uint32_t partition) const override;
    std::uint64_t end_offset(const std::string& topic, std::uint32_t partition) const override;
    std::vector<BusMessage> read(const std::string& topic, std::uint32_t partition) const override;

private:
    struct Topic {
        std::vector<std::vector<BusMessage>> partitions;
    };
    struct GroupState {
        // Per partition: next offset to deliver from (committed + 1) and the
        // delivered high-water mark (one past the highest delivered offset).
        std::vector<std::uint64_t> next;
        std::vector<std::uint64_t> delivered;
    };

    Topic& topic_locked(const std::string& name);
    const Topic& topic_locked(const std::string& name) const;
    GroupState& group_locked(const std::string& group, const std::string& topic);
    PublishResult append_locked(const std::string& topic, std::uint32_t partition, const std::string& key,
                                const std::string& payload, std::int64_t ingest_us, bool journal);
    void journal_locked(const std::string& line);
    void replay(const std::string& path);

    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::map<std::string, Topic> topics_;
    std::map<std::pair<std::string, std::string>, GroupState> groups_;
    std::unique_ptr<std::ofstream> journal_;
};

}  // namespace vithsd::streaming
