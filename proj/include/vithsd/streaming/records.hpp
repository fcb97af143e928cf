#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "vithsd/core/types.hpp"
#include "vithsd/streaming/bus.hpp"

namespace vithsd::streaming {

/// A comment as carried on the comments topic.
struct StreamMessage {
    std::string topic;
    std::uint32_t partition = 0;
    std::uint64_t offset = 0;
    std::string key;
    Comment payload;
    std::int64_t ingest_ts = 0;
};

/// Bus payload encoding of a comment: {"id","text","ts"?,"source"?}.
std::string encode_comment(const Comment& c);
Comment decode_comment(const std::string& payload);
StreamMessage to_stream_message(const BusMessage& m);

struct PredictionRecord {
    std::string id;
    TermList terms;
    std::string model;
    double latency_ms = 0.0;          // publish to comments topic -> prediction ready
    std::int64_t processed_ts = 0;    // epoch ms
    std::optional<std::int64_t> event_ts;  // comment timestamp, for windows
    std::uint32_t partition = 0;      // source partition and offset
    std::uint64_t offset = 0;

    /// Event time when known, otherwise processing time.
    std::int64_t window_ts() const noexcept { return event_ts.value_or(processed_ts); }
};

nlohmann::json to_json(const PredictionRecord& r);
/// Throws ParseError on missing fields or malformed terms.
PredictionRecord record_from_json(const nlohmann::json& j);

}  // namespace vithsd::streaming
