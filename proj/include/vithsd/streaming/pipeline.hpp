#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vithsd/classifier/predictor.hpp"
#include "vithsd/streaming/bus.hpp"
#include "vithsd/streaming/latency.hpp"
#include "vithsd/streaming/sink.hpp"
#include "vithsd/streaming/source.hpp"
#include "vithsd/streaming/window.hpp"

namespace vithsd::streaming {

struct PipelineConfig {
    std::string comments_topic = "comments";
    std::string predictions_topic = "predictions";
    std::string dead_letter_topic = "dead-letter";
    std::uint32_t partitions = 4;
    unsigned workers = 2;
    std::size_t poll_batch = 32;
    std::int64_t window_seconds = kDefaultWindowSeconds;
    std::int64_t lateness_windows = 2;
    std::chrono::milliseconds poll_wait{20};
    std::chrono::milliseconds sink_retry_backoff{1};
    /// Consecutive failed writes of one record before the run gives up.
    std::size_t max_sink_retries = 1000;

    /// Fault injection: probability that a worker dies after publishing a
    /// prediction and before committing its input. The supervisor restarts it.
    double worker_crash_rate = 0.0;
    std::size_t max_injected_crashes = 100;
    std::uint64_t fault_seed = 7;

    void validate() const;
    static PipelineConfig from_json(const nlohmann::json& j);
};

/// Live view of a run, safe to read from other threads (the HTTP service
/// exposes it).
class PipelineMonitor {
public:
    explicit PipelineMonitor(std::int64_t window_seconds = kDefaultWindowSeconds, std::int64_t lateness_windows = 2);

    void observe(const PredictionRecord& r);
    void reset(std::int64_t window_seconds, std::int64_t lateness_windows);

    std::size_t count() const;
    /// nullopt when no record has been observed.
    std::optional<LatencyReport> latency() const;
    std::vector<WindowAggregate> windows() const;
    std::size_t late_count() const;

private:
    mutable std::mutex mu_;
    std::vector<PredictionRecord> records_;
    WindowAggregator aggregator_;
};

struct RunReport {
    std::size_t source_count = 0;
    std::size_t published = 0;
    std::size_t predictions_published = 0;
    std::size_t stored = 0;
    std::size_t duplicates_absorbed = 0;
    std::size_t dead_lettered = 0;
    std::size_t worker_restarts = 0;
    std::size_t sink_failures = 0;
    std::optional<LatencyReport> latency;
    std::vector<WindowAggregate> windows;
    std::vector<PredictionRecord> late;
    std::vector<PredictionRecord> records;  // newly stored, in sink order
    double duration_ms = 0.0;

    nlohmann::json to_json() const;
};

struct PipelineHooks {
    Broker* broker = nullptr;            // defaults to a private in-process LogBroker
    DeadLetterFile* dead_letters = nullptr;
    PipelineMonitor* monitor = nullptr;
};

/// source -> comments topic -> workers (preprocess, predict) -> predictions
/// topic -> single sink writer. Worker w owns partitions p with p % workers == w,
/// and predictions stay on their input's partition so per-partition order
/// reaches the sink. Inputs are committed only after their prediction is
/// published; predictions only after the sink write returned. The run ends
/// once the source is exhausted and every message is committed.
RunReport run_pipeline(SourceAdapter& source, classifier::Predictor& predictor, RecordSink& sink,
                       const PipelineConfig& config = {}, const PipelineHooks& hooks = {});

}  // namespace vithsd::streaming
