#include "vithsd/streaming/pipeline.hpp"

#include <atomic>
#include <random>
#include <thread>
#include <unordered_set>

#include "vithsd/core/errors.hpp"
#include "vithsd/core/text.hpp"

namespace vithsd::streaming {

void PipelineConfig::validate() const {
    auto bad = [](const std::string& m) { raise(ErrorCode::InvalidConfig, m); };
    if (partitions == 0) bad("partitions must be at least 1");
    if (workers == 0) bad("workers must be at least 1");
    if (poll_batch == 0) bad("poll_batch must be at least 1");
    if (window_seconds <= 0) bad("window_seconds must be positive");
    if (lateness_windows < 1) bad("lateness_windows must be at least 1");
    if (worker_crash_rate < 0.0 || worker_crash_rate >= 1.0) bad("worker_crash_rate must be in [0, 1)");
    if (comments_topic.empty() || predictions_topic.empty() || dead_letter_topic.empty()) bad("topic names must be set");
    if (comments_topic == predictions_topic) bad("comments and predictions topics must differ");
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
    PipelineConfig c;
    try {
        c.comments_topic = j.value("comments_topic", c.comments_topic);
        c.predictions_topic = j.value("predictions_topic", c.predictions_topic);
        c.dead_letter_topic = j.value("dead_letter_topic", c.dead_letter_topic);
        c.partitions = j.value("partitions", c.partitions);
        c.workers = j.value("workers", c.workers);
        c.poll_batch = j.value("poll_batch", c.poll_batch);
        c.window_seconds = j.value("window_seconds", c.window_seconds);
        c.lateness_windows = j.value("lateness_windows", c.lateness_windows);
        c.poll_wait = std::chrono::milliseconds(j.value("poll_wait_ms", c.poll_wait.count()));
        c.max_sink_retries = j.value("max_sink_retries", c.max_sink_retries);
        c.worker_crash_rate = j.value("worker_crash_rate", c.worker_crash_rate);
        c.max_injected_crashes = j.value("max_injected_crashes", c.max_injected_crashes);
        c.fault_seed = j.value("fault_seed", c.fault_seed);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::InvalidConfig, std::string("pipeline config: ") + e.what());
    }
    c.validate();
    return c;
}

PipelineMonitor::PipelineMonitor(std::int64_t window_seconds, std::int64_t lateness_windows)
    : aggregator_(window_seconds, lateness_windows) {}

void PipelineMonitor::observe(const PredictionRecord& r) {
    std::lock_guard lock(mu_);
    records_.push_back(r);
    aggregator_.add(r);
}

void PipelineMonitor::reset(std::int64_t window_seconds, std::int64_t lateness_windows) {
    std::lock_guard lock(mu_);
    records_.clear();
    aggregator_ = WindowAggregator(window_seconds, lateness_windows);
}

std::size_t PipelineMonitor::count() const {
    std::lock_guard lock(mu_);
    return records_.size();
}

std::optional<LatencyReport> PipelineMonitor::latency() const {
    std::lock_guard lock(mu_);
    if (records_.empty()) return std::nullopt;
    return latency_report(records_);
}

std::vector<WindowAggregate> PipelineMonitor::windows() const {
    std::lock_guard lock(mu_);
    return aggregator_.windows();
}

std::size_t PipelineMonitor::late_count() const {
    std::lock_guard lock(mu_);
    return aggregator_.late().size();
}

nlohmann::json RunReport::to_json() const {
    nlohmann::json j = {{"source_count", source_count},
                        {"published", published},
                        {"predictions_published", predictions_published},
                        {"stored", stored},
                        {"duplicates_absorbed", duplicates_absorbed},
                        {"dead_lettered", dead_lettered},
                        {"worker_restarts", worker_restarts},
                        {"sink_failures", sink_failures},
                        {"late_records", late.size()},
                        {"windows", streaming::to_json(windows)},
                        {"duration_ms", duration_ms}};
    j["latency"] = latency ? streaming::to_json(*latency) : nlohmann::json(nullptr);
    return j;
}

namespace {

struct WorkerCrash {};

std::int64_t now_us() {
    return std::chrono::duration_cast<std::chrono::microseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

void ensure_topic(Broker& broker, const std::string& name, std::uint32_t partitions) {
    if (auto t = broker.topic(name)) {
        if (t->partitions != partitions) {
            raise(ErrorCode::InvalidConfig, "topic '" + name + "' exists with " + std::to_string(t->partitions) +
                                                " partitions, expected " + std::to_string(partitions));
        }
        return;
    }
    broker.create_topic(name, partitions);
}

class Run {
public:
    Run(SourceAdapter& source, classifier::Predictor& predictor, RecordSink& sink, const PipelineConfig& cfg,
        const PipelineHooks& hooks, Broker& broker)
        : source_(source), predictor_(predictor), sink_(sink), cfg_(cfg), hooks_(hooks), broker_(broker),
          rng_(cfg.fault_seed), aggregator_(cfg.window_seconds, cfg.lateness_windows) {}

    RunReport execute();

private:
    void produce();
    void supervise(unsigned slot);
    void work(unsigned slot, const std::vector<std::uint32_t>& parts);
    void consume();
    bool inputs_drained(const std::vector<std::uint32_t>& parts) const;
    bool predictions_drained() const;
    bool crash_now();
    void dead_letter(const std::string& id, const std::string& error);
    void fail(std::exception_ptr e);

    SourceAdapter& source_;
    classifier::Predictor& predictor_;
    RecordSink& sink_;
    const PipelineConfig& cfg_;
    const PipelineHooks& hooks_;
    Broker& broker_;

    const std::string worker_group_ = "classifier-workers";
    const std::string sink_group_ = "sink-writer";

    std::atomic<bool> producer_done_{false};
    std::atomic<unsigned> workers_running_{0};
    std::atomic<bool> abort_{false};
    std::atomic<std::size_t> source_count_{0}, published_{0}, predictions_published_{0}, restarts_{0};

    std::mutex mu_;  // guards the fields below
    std::exception_ptr error_;
    std::mt19937_64 rng_;
    std::size_t crashes_ = 0;
    std::unordered_set<std::string> dead_ids_;

    // Sink-consumer state; only the consumer thread touches these.
    WindowAggregator aggregator_;
    std::unordered_set<std::string> emitted_;
    std::vector<PredictionRecord> stored_;
    std::size_t duplicates_ = 0;
    std::size_t sink_failures_ = 0;
};

void Run::fail(std::exception_ptr e) {
    std::lock_guard lock(mu_);
    if (!error_) error_ = e;
    abort_ = true;
}

bool Run::crash_now() {
    if (cfg_.worker_crash_rate <= 0.0) return false;
    std::lock_guard lock(mu_);
    if (crashes_ >= cfg_.max_injected_crashes) return false;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng_) >= cfg_.worker_crash_rate) return false;
    ++crashes_;
    return true;
}

void Run::dead_letter(const std::string& id, const std::string& error) {
    const auto ts = now_us() / 1000;
    broker_.publish(cfg_.dead_letter_topic, id, nlohmann::json{{"id", id}, {"error", error}}.dump());
    bool fresh;
    {
        std::lock_guard lock(mu_);
        fresh = dead_ids_.insert(id).second;
    }
    if (fresh && hooks_.dead_letters) hooks_.dead_letters->write(id, error, ts);
}

void Run::produce() {
    try {
        while (!abort_) {
            auto c = source_.next();
            if (!c) break;
            ++source_count_;
            try {
                validate_comment(*c);
            } catch (const Error& e) {
                dead_letter(c->id.empty() ? "<no id>" : c->id, e.what());
                continue;
            }
            broker_.publish(cfg_.comments_topic, c->id, encode_comment(*c));
            ++published_;
        }
    } catch (...) {
        fail(std::current_exception());
    }
    producer_done_ = true;
}

bool Run::inputs_drained(const std::vector<std::uint32_t>& parts) const {
    for (auto p : parts) {
        const auto end = broker_.end_offset(cfg_.comments_topic, p);
        const auto done = broker_.committed(worker_group_, cfg_.comments_topic, p);
        if (end > 0 && (!done || *done + 1 < end)) return false;
    }
    return true;
}

bool Run::predictions_drained() const {
    for (std::uint32_t p = 0; p < cfg_.partitions; ++p) {
        const auto end = broker_.end_offset(cfg_.predictions_topic, p);
        const auto done = broker_.committed(sink_group_, cfg_.predictions_topic, p);
        if (end > 0 && (!done || *done + 1 < end)) return false;
    }
    return true;
}

void Run::work(unsigned /*slot*/, const std::vector<std::uint32_t>& parts) {
    while (!abort_) {
        auto batch = broker_.poll(worker_group_, cfg_.comments_topic, cfg_.poll_batch, &parts, cfg_.poll_wait);
        if (batch.empty()) {
            if (producer_done_ && inputs_drained(parts)) return;
            continue;
        }
        for (const auto& m : batch) {
            if (abort_) return;
            Comment c;
            try {
                c = decode_comment(m.payload);
            } catch (const Error& e) {
                dead_letter(m.key, e.what());
                broker_.commit(worker_group_, cfg_.comments_topic, m.partition, m.offset);
                continue;
            }
            PredictionRecord rec;
            try {
                Comment clean = c;
                clean.text = preprocess_text(c.text);
                const auto out = predictor_.predict(clean);
                rec.id = c.id;
                rec.terms = out.terms();
                rec.model = out.model_id.empty() ? predictor_.model_id() : out.model_id;
            } catch (const std::exception& e) {
                dead_letter(c.id, std::string("ClassifierFailure: ") + e.what());
                broker_.commit(worker_group_, cfg_.comments_topic, m.partition, m.offset);
                continue;
            }
            const auto done_us = now_us();
            rec.latency_ms = std::max(0.0, static_cast<double>(done_us - m.ingest_us) / 1000.0);
            rec.processed_ts = done_us / 1000;
            rec.event_ts = c.timestamp_ms.value_or(m.ingest_ts);
            rec.partition = m.partition;
            rec.offset = m.offset;
            broker_.publish_to(cfg_.predictions_topic, m.partition, rec.id, to_json(rec).dump());
            ++predictions_published_;
            if (crash_now()) throw WorkerCrash{};
            broker_.commit(worker_group_, cfg_.comments_topic, m.partition, m.offset);
        }
    }
}

void Run::supervise(unsigned slot) {
    std::vector<std::uint32_t> parts;
    for (std::uint32_t p = slot; p < cfg_.partitions; p += cfg_.workers) parts.push_back(p);
    try {
        if (!parts.empty()) {
            while (true) {
                try {
                    work(slot, parts);
                    break;
                } catch (const WorkerCrash&) {
                    ++restarts_;
                }
            }
        }
    } catch (...) {
        fail(std::current_exception());
    }
    --workers_running_;
}

void Run::consume() {
    try {
        std::size_t consecutive_failures = 0;
        while (!abort_) {
            auto batch = broker_.poll(sink_group_, cfg_.predictions_topic, cfg_.poll_batch, nullptr, cfg_.poll_wait);
            if (batch.empty()) {
                if (producer_done_ && workers_running_ == 0 && predictions_drained()) return;
                continue;
            }
            for (const auto& m : batch) {
                const PredictionRecord rec = record_from_json(nlohmann::json::parse(m.payload));
                try {
                    sink_.put(rec);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::SinkFailure) throw;
                    ++sink_failures_;
                    if (++consecutive_failures > cfg_.max_sink_retries) throw;
                    std::this_thread::sleep_for(cfg_.sink_retry_backoff);
                    break;  // re-poll from the committed offset
                }
                consecutive_failures = 0;
                broker_.commit(sink_group_, cfg_.predictions_topic, m.partition, m.offset);
                if (!emitted_.insert(rec.id).second) {
                    ++duplicates_;
                    continue;
                }
                stored_.push_back(rec);
                aggregator_.add(rec);
                if (hooks_.monitor) hooks_.monitor->observe(rec);
            }
        }
    } catch (...) {
        fail(std::current_exception());
    }
}

RunReport Run::execute() {
    const auto start = std::chrono::steady_clock::now();
    ensure_topic(broker_, cfg_.comments_topic, cfg_.partitions);
    ensure_topic(broker_, cfg_.predictions_topic, cfg_.partitions);
    ensure_topic(broker_, cfg_.dead_letter_topic, 1);
    broker_.register_group(worker_group_, cfg_.comments_topic);
    broker_.register_group(sink_group_, cfg_.predictions_topic);

    workers_running_ = cfg_.workers;
    std::vector<std::thread> threads;
    threads.emplace_back([this] { produce(); });
    for (unsigned w = 0; w < cfg_.workers; ++w) threads.emplace_back([this, w] { supervise(w); });
    threads.emplace_back([this] { consume(); });
    for (auto& t : threads) t.join();
    if (error_) std::rethrow_exception(error_);

    RunReport r;
    r.source_count = source_count_;
    r.published = published_;
    r.predictions_published = predictions_published_;
    r.stored = stored_.size();
    r.duplicates_absorbed = duplicates_;
    r.dead_lettered = dead_ids_.size();
    r.worker_restarts = restarts_;
    r.sink_failures = sink_failures_;
    if (!stored_.empty()) r.latency = latency_report(stored_);
    r.windows = aggregator_.windows();
    r.late = aggregator_.late();
    r.records = std::move(stored_);
    r.duration_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace

RunReport run_pipeline(SourceAdapter& source, classifier::Predictor& predictor, RecordSink& sink,
                       const PipelineConfig& config, const PipelineHooks& hooks) {
    config.validate();
    LogBroker own;
    Broker& broker = hooks.broker ? *hooks.broker : own;
    Run run(source, predictor, sink, config, hooks, broker);
    return run.execute();
}

}  // namespace vithsd::streaming
