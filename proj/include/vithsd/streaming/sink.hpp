#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "vithsd/streaming/records.hpp"

namespace vithsd::streaming {

/// Keyed by comment id. put() returns true when the record was newly stored
/// and false when the id was already present (the earlier copy wins).
/// Throws SinkFailure when the write could not be made durable.
class RecordSink {
public:
    virtual ~RecordSink() = default;
    virtual bool put(const PredictionRecord& record) = 0;
    virtual std::size_t size() const = 0;
};

/// Records kept in insertion order. Thread-safe.
class MemorySink final : public RecordSink {
public:
    bool put(const PredictionRecord& record) override;
    std::size_t size() const override;
    std::vector<PredictionRecord> records() const;

private:
    mutable std::mutex mu_;
    std::unordered_set<std::string> ids_;
    std::vector<PredictionRecord> records_;
};

/// Append-only newline-delimited JSON file. Reopening an existing file
/// reloads its ids so a restarted run stays idempotent; a torn last line is
/// cut off first. With fsync enabled every put is synced before returning.
class NdjsonFileSink final : public RecordSink {
public:
    explicit NdjsonFileSink(std::string path, bool fsync = false);
    ~NdjsonFileSink() override;

    bool put(const PredictionRecord& record) override;
    std::size_t size() const override;
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
    bool fsync_;
    int fd_ = -1;
    mutable std::mutex mu_;
    std::unordered_set<std::string> ids_;
};

/// Reads every record of a sink file (torn last line ignored).
std::vector<PredictionRecord> read_sink_file(const std::string& path);

/// Contract a document database adapter must satisfy: put is idempotent by id.
class DocumentStore {
public:
    virtual ~DocumentStore() = default;
    virtual bool put(const std::string& id, const nlohmann::json& doc) = 0;
    virtual std::optional<nlohmann::json> get(const std::string& id) const = 0;
    virtual std::size_t size() const = 0;
};

class InMemoryDocumentStore final : public DocumentStore {
public:
    bool put(const std::string& id, const nlohmann::json& doc) override;
    std::optional<nlohmann::json> get(const std::string& id) const override;
    std::size_t size() const override;

private:
    mutable std::mutex mu_;
    std::map<std::string, nlohmann::json> docs_;
};

class DocumentStoreSink final : public RecordSink {
public:
    explicit DocumentStoreSink(DocumentStore& store) : store_(store) {}
    bool put(const PredictionRecord& record) override { return store_.put(record.id, to_json(record)); }
    std::size_t size() const override { return store_.size(); }

private:
    DocumentStore& store_;
};

/// Writes failed messages as sink-shaped lines with an "error" field.
class DeadLetterFile {
public:
    explicit DeadLetterFile(const std::string& path);
    void write(const std::string& id, const std::string& error, std::int64_t processed_ts);
    std::size_t count() const;

private:
    mutable std::mutex mu_;
    std::ofstream out_;
    std::size_t count_ = 0;
};

/// Test double: fails a fraction of puts with SinkFailure. Half of the
/// failures happen after the inner write succeeded, so the caller retries a
/// record that is already stored.
class FaultInjectingSink final : public RecordSink {
public:
    FaultInjectingSink(RecordSink& inner, double failure_rate, std::uint64_t seed);
    bool put(const PredictionRecord& record) override;
    std::size_t size() const override { return inner_.size(); }
    std::size_t failures() const;

private:
    RecordSink& inner_;
    double rate_;
    mutable std::mutex mu_;
    std::mt19937_64 rng_;
    std::size_t failures_ = 0;
};

}  // namespace vithsd::streaming
