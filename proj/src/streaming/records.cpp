#include "vithsd/streaming/records.hpp"

#include "vithsd/core/errors.hpp"
#include "vithsd/core/labels.hpp"

namespace vithsd::streaming {

std::string encode_comment(const Comment& c) {
    nlohmann::json j = {{"id", c.id}, {"text", c.text}};
    if (c.timestamp_ms) j["ts"] = *c.timestamp_ms;
    if (!c.source.empty()) j["source"] = c.source;
    return j.dump();
}

Comment decode_comment(const std::string& payload) {
    try {
        const auto j = nlohmann::json::parse(payload);
        Comment c;
        c.id = j.at("id").get<std::string>();
        c.text = j.at("text").get<std::string>();
        if (j.contains("ts") && !j["ts"].is_null()) c.timestamp_ms = j["ts"].get<std::int64_t>();
        c.source = j.value("source", "");
        return c;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::ParseError, std::string("comment payload: ") + e.what());
    }
}

StreamMessage to_stream_message(const BusMessage& m) {
    return {m.topic, m.partition, m.offset, m.key, decode_comment(m.payload), m.ingest_ts};
}

nlohmann::json to_json(const PredictionRecord& r) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : r.terms) terms.push_back(t.str());
    nlohmann::json j = {{"id", r.id},
                        {"terms", terms},
                        {"model", r.model},
                        {"latency_ms", r.latency_ms},
                        {"processed_ts", r.processed_ts}};
    if (r.event_ts) j["event_ts"] = *r.event_ts;
    j["partition"] = r.partition;
    j["offset"] = r.offset;
    return j;
}

PredictionRecord record_from_json(const nlohmann::json& j) {
    PredictionRecord r;
    try {
        r.id = j.at("id").get<std::string>();
        std::string list = "[";
        for (const auto& t : j.at("terms")) list += t.get<std::string>() + ",";
        list += "]";
        r.terms = parse_label_list(list);
        r.model = j.value("model", "");
        r.latency_ms = j.value("latency_ms", 0.0);
        r.processed_ts = j.value("processed_ts", std::int64_t{0});
        if (j.contains("event_ts") && !j["event_ts"].is_null()) r.event_ts = j["event_ts"].get<std::int64_t>();
        r.partition = j.value("partition", std::uint32_t{0});
        r.offset = j.value("offset", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::ParseError, std::string("prediction record: ") + e.what());
    } catch (const Error& e) {
        raise(ErrorCode::ParseError, std::string("prediction record terms: ") + e.what());
    }
    if (r.latency_ms < 0.0) raise(ErrorCode::ParseError, "prediction record has negative latency");
    return r;
}

}  // namespace vithsd::streaming
