#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <random>
#include <set>
#include <thread>

#include "synthetic.hpp"
#include "vithsd/classifier/predictor.hpp"
#include "vithsd/core/errors.hpp"
#include "vithsd/core/labels.hpp"
#include "vithsd/streaming/bus.hpp"
#include "vithsd/streaming/latency.hpp"
#include "vithsd/streaming/pipeline.hpp"
#include "vithsd/streaming/records.hpp"
#include "vithsd/streaming/sink.hpp"
#include "vithsd/streaming/source.hpp"
#include "vithsd/streaming/window.hpp"

using namespace vithsd;
using namespace vithsd::streaming;

namespace {

template <typename F>
ErrorCode code_of_throw(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::IoError;
}

// Deterministic stand-in classifier: labels come from the cue words, so the
// expected terms of every comment are known up front.
class KeywordPredictor final : public classifier::Predictor {
public:
    explicit KeywordPredictor(std::set<std::string> fail_ids = {}) : fail_(std::move(fail_ids)) {}
    classifier::PredictionOutput predict(const Comment& c) override {
        if (fail_.count(c.id)) raise(ErrorCode::ClassifierFailure, "refusing " + c.id);
        classifier::PredictionOutput out;
        out.comment_id = c.id;
        out.model_id = "keyword";
        if (c.text.find("anh ấy") != std::string::npos) out.labels.set(Target::Individuals, HatredLevel::Hate);
        if (c.text.find("nhóm đó") != std::string::npos) out.labels.set(Target::Groups, HatredLevel::Offensive);
        for (auto& row : out.probabilities) row = {1, 0, 0, 0};
        return out;
    }
    std::string model_id() const override { return "keyword"; }

private:
    std::set<std::string> fail_;
};

PredictionRecord rec(const std::string& id, const std::string& terms, std::int64_t ts, double latency = 1.0) {
    PredictionRecord r;
    r.id = id;
    r.terms = parse_label_list(terms);
    r.model = "m";
    r.latency_ms = latency;
    r.processed_ts = ts;
    r.event_ts = ts;
    return r;
}

std::uint64_t term_total(std::span<const PredictionRecord> rs) {
    std::uint64_t n = 0;
    for (const auto& r : rs) n += r.terms.size();
    return n;
}

std::uint64_t cell_total(std::span<const WindowAggregate> ws) {
    std::uint64_t n = 0;
    for (const auto& w : ws) n += w.total();
    return n;
}

PipelineConfig fast_config() {
    PipelineConfig c;
    c.poll_wait = std::chrono::milliseconds(2);
    return c;
}

}  // namespace

TEST(Bus, CreateTopicRules) {
    LogBroker b;
    const auto h = b.create_topic("comments", 4);
    EXPECT_EQ(h.partitions, 4u);
    for (std::uint32_t p = 0; p < 4; ++p) EXPECT_EQ(b.end_offset("comments", p), 0u);
    EXPECT_EQ(code_of_throw([&] { b.create_topic("x", 0); }), ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of_throw([&] { b.create_topic("comments", 2); }), ErrorCode::TopicExists);
    EXPECT_FALSE(b.topic("missing").has_value());
}

TEST(Bus, PublishRoutingAndGaplessOffsets) {
    LogBroker b;
    b.create_topic("t", 4);
    const auto a1 = b.publish("t", "same", "1");
    const auto a2 = b.publish("t", "same", "2");
    EXPECT_EQ(a1.partition, a2.partition);
    EXPECT_EQ(a2.offset, a1.offset + 1);
    EXPECT_EQ(a1.partition, key_hash("same") % 4);

    std::map<std::uint32_t, std::vector<std::uint64_t>> offsets;
    for (int i = 0; i < 1000; ++i) {
        const auto r = b.publish("t", "k" + std::to_string(i), "x");
        offsets[r.partition].push_back(r.offset);
    }
    std::size_t total = 0;
    for (std::uint32_t p = 0; p < 4; ++p) {
        const auto all = b.read("t", p);
        for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i].offset, i);
        total += all.size();
        EXPECT_EQ(b.end_offset("t", p), all.size());
    }
    EXPECT_EQ(total, 1002u);
    EXPECT_EQ(offsets.size(), 4u);
    EXPECT_EQ(code_of_throw([&] { b.publish("nope", "k", "x"); }), ErrorCode::UnknownTopic);
}

TEST(Bus, KeyHashIsFnv1a) {
    EXPECT_EQ(key_hash(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(key_hash("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(key_hash("foobar"), 0x85944171f73967e8ULL);
}

TEST(Bus, PollCommitRedelivery) {
    LogBroker b;
    b.create_topic("t", 1);
    for (int i = 0; i < 3; ++i) b.publish("t", "k", std::to_string(i));
    EXPECT_EQ(code_of_throw([&] { b.poll("g", "t", 10); }), ErrorCode::UnknownGroup);
    b.register_group("g", "t");
    b.register_group("g", "t");
    auto first = b.poll("g", "t", 10);
    ASSERT_EQ(first.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(first[i].payload, std::to_string(i));
    auto again = b.poll("g", "t", 10);
    ASSERT_EQ(again.size(), 3u);
    EXPECT_EQ(again[0].offset, 0u);

    b.commit("g", "t", 0, 1);
    auto rest = b.poll("g", "t", 10);
    ASSERT_EQ(rest.size(), 1u);
    EXPECT_EQ(rest[0].offset, 2u);
    EXPECT_EQ(b.committed("g", "t", 0), std::optional<std::uint64_t>(1));
    b.commit("g", "t", 0, 0);
    EXPECT_EQ(b.committed("g", "t", 0), std::optional<std::uint64_t>(1));
    EXPECT_EQ(code_of_throw([&] { b.commit("g", "t", 0, 10); }), ErrorCode::InvalidCommit);
}

TEST(Bus, CommitOfUndeliveredOffsetIsRejected) {
    LogBroker b;
    b.create_topic("t", 1);
    for (int i = 0; i < 3; ++i) b.publish("t", "k", "x");
    b.register_group("g", "t");
    EXPECT_EQ(code_of_throw([&] { b.commit("g", "t", 0, 0); }), ErrorCode::InvalidCommit);
    b.poll("g", "t", 1);
    EXPECT_NO_THROW(b.commit("g", "t", 0, 0));
    EXPECT_EQ(code_of_throw([&] { b.commit("g", "t", 0, 1); }), ErrorCode::InvalidCommit);
}

TEST(Bus, GroupsAreIsolated) {
    LogBroker b;
    b.create_topic("t", 2);
    for (int i = 0; i < 10; ++i) b.publish("t", "k" + std::to_string(i), "x");
    b.register_group("a", "t");
    b.register_group("b", "t");
    const auto a = b.poll("a", "t", 100);
    for (const auto& m : a) b.commit("a", "t", m.partition, m.offset);
    EXPECT_EQ(a.size(), 10u);
    EXPECT_TRUE(b.poll("a", "t", 100).empty());
    EXPECT_EQ(b.poll("b", "t", 100).size(), 10u);
}

TEST(Bus, PartitionFilterAndWait) {
    LogBroker b;
    b.create_topic("t", 4);
    b.register_group("g", "t");
    for (int i = 0; i < 40; ++i) b.publish("t", "k" + std::to_string(i), "x");
    const std::vector<std::uint32_t> only{2};
    for (const auto& m : b.poll("g", "t", 100, &only)) EXPECT_EQ(m.partition, 2u);

    LogBroker empty;
    empty.create_topic("t", 1);
    empty.register_group("g", "t");
    std::thread pub([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(30));
        empty.publish("t", "k", "late");
    });
    const auto got = empty.poll("g", "t", 1, nullptr, std::chrono::milliseconds(2000));
    pub.join();
    ASSERT_EQ(got.size(), 1u);
    EXPECT_EQ(got[0].payload, "late");
}

TEST(Bus, JournalRestoresCommittedPosition) {
    fixtures::TempDir dir;
    const auto path = (dir / "bus.journal").string();
    {
        LogBroker b(path);
        b.create_topic("t", 1);
        b.register_group("g", "t");
        for (int i = 0; i < 5; ++i) b.publish("t", "k", std::to_string(i));
        b.poll("g", "t", 5);
        b.commit("g", "t", 0, 2);
    }
    {
        std::ofstream torn(path, std::ios::app);
        torn << R"({"op":"pub","topic":"t")";
    }
    LogBroker restored(path);
    EXPECT_EQ(restored.end_offset("t", 0), 5u);
    EXPECT_EQ(restored.committed("g", "t", 0), std::optional<std::uint64_t>(2));
    const auto next = restored.poll("g", "t", 10);
    ASSERT_EQ(next.size(), 2u);
    EXPECT_EQ(next[0].offset, 3u);
    EXPECT_EQ(next[0].payload, "3");
}

TEST(Bus, RandomizedPerPartitionOrder) {
    LogBroker b;
    b.create_topic("t", 8);
    b.register_group("g", "t");
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> keys(0, 300);
    std::map<std::uint32_t, std::vector<std::string>> published;
    std::map<std::string, std::uint32_t> key_partition;
    for (int i = 0; i < 10000; ++i) {
        const std::string key = "key" + std::to_string(keys(rng));
        const auto r = b.publish("t", key, std::to_string(i));
        published[r.partition].push_back(std::to_string(i));
        auto [it, fresh] = key_partition.emplace(key, r.partition);
        EXPECT_EQ(it->second, r.partition);
    }
    std::map<std::uint32_t, std::vector<std::string>> seen;
    std::uniform_int_distribution<std::size_t> batch(1, 200);
    for (;;) {
        const auto got = b.poll("g", "t", batch(rng));
        if (got.empty()) break;
        for (const auto& m : got) {
            seen[m.partition].push_back(m.payload);
            b.commit("g", "t", m.partition, m.offset);
        }
    }
    EXPECT_EQ(seen, published);
}

TEST(Records, CommentAndPredictionJson) {
    const Comment c{"id1", "Xin chào", 1234, "replay"};
    const auto back = decode_comment(encode_comment(c));
    EXPECT_EQ(back.id, c.id);
    EXPECT_EQ(back.text, c.text);
    EXPECT_EQ(back.timestamp_ms, c.timestamp_ms);

    const auto r = rec("a", "[individuals#hate, politics#clean]", 5000, 3.5);
    const auto j = to_json(r);
    EXPECT_EQ(j["terms"], nlohmann::json::array({"individuals#hate", "politics#clean"}));
    const auto r2 = record_from_json(j);
    EXPECT_EQ(r2.terms, r.terms);
    EXPECT_EQ(r2.latency_ms, 3.5);
    EXPECT_EQ(code_of_throw([] { record_from_json({{"id", "x"}}); }), ErrorCode::ParseError);
    EXPECT_EQ(code_of_throw([] { decode_comment("not json"); }), ErrorCode::ParseError);
}

TEST(Source, ReplayFileLoading) {
    fixtures::TempDir dir;
    const auto good = fixtures::timed_comments(5, 1000, 10, 1);
    fixtures::write_replay_file(dir / "ok.jsonl", good);
    EXPECT_EQ(load_replay_file((dir / "ok.jsonl").string()).size(), 5u);

    { std::ofstream(dir / "empty.jsonl"); }
    auto empty = ReplaySource::from_file((dir / "empty.jsonl").string(), 1.0);
    EXPECT_FALSE(empty.next().has_value());

    {
        std::ofstream out(dir / "unsorted.jsonl");
        out << R"({"id":"a","ts":2000,"text":"x"})" << "\n" << R"({"id":"b","ts":1000,"text":"y"})" << "\n";
    }
    try {
        load_replay_file((dir / "unsorted.jsonl").string());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
        EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
    }
    {
        std::ofstream out(dir / "bad.jsonl");
        out << R"({"id":"a","ts":1,"text":"x"})" << "\n" << "{broken" << "\n";
    }
    EXPECT_EQ(code_of_throw([&] { load_replay_file((dir / "bad.jsonl").string()); }), ErrorCode::ParseError);
    EXPECT_EQ(code_of_throw([&] { load_replay_file((dir / "missing.jsonl").string()); }), ErrorCode::IoError);
}

TEST(Source, ReplayKeepsScaledGaps) {
    std::vector<Comment> two{{"a", "x", 0, ""}, {"b", "y", 60000, ""}};
    ReplaySource src(two, 10.0);
    ASSERT_TRUE(src.next().has_value());
    const auto t0 = std::chrono::steady_clock::now();
    ASSERT_TRUE(src.next().has_value());
    const double gap = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_NEAR(gap, 6.0, 0.5);
    EXPECT_FALSE(src.next().has_value());
}

TEST(Source, UnthrottledReplayIsImmediate) {
    ReplaySource src(fixtures::timed_comments(100, 0, 60000, 2), kUnthrottled);
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t n = 0;
    while (src.next()) ++n;
    EXPECT_EQ(n, 100u);
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1.0);
}

TEST(Source, MockPollerBatches) {
    PollingSourceConfig cfg;
    cfg.interval = std::chrono::milliseconds(1);
    cfg.batch_size = 3;
    cfg.stream_id = "video-1";
    auto backlog = fixtures::timed_comments(7, 0, 1, 3);
    backlog.push_back(backlog[0]);
    MockPoller poller(cfg, backlog);
    std::vector<std::string> ids;
    while (auto c = poller.next()) ids.push_back(c->id);
    EXPECT_EQ(ids.size(), 7u);
    EXPECT_GE(poller.polls(), 3u);
}

TEST(Sink, MemoryAndDocumentStoreAreIdempotent) {
    MemorySink m;
    EXPECT_TRUE(m.put(rec("a", "[]", 1)));
    EXPECT_FALSE(m.put(rec("a", "[groups#hate]", 2)));
    EXPECT_EQ(m.size(), 1u);
    EXPECT_TRUE(m.records()[0].terms.empty());

    InMemoryDocumentStore store;
    DocumentStoreSink ds(store);
    EXPECT_TRUE(ds.put(rec("a", "[]", 1)));
    EXPECT_FALSE(ds.put(rec("a", "[]", 1)));
    EXPECT_EQ(store.get("a")->at("id"), "a");
    EXPECT_FALSE(store.get("b").has_value());
}

TEST(Sink, FileSinkReloadsAndCutsTornTail) {
    fixtures::TempDir dir;
    const auto path = (dir / "sink.jsonl").string();
    {
        NdjsonFileSink s(path, true);
        EXPECT_TRUE(s.put(rec("a", "[groups#hate]", 1)));
        EXPECT_TRUE(s.put(rec("b", "[]", 2)));
        EXPECT_FALSE(s.put(rec("a", "[]", 3)));
    }
    {
        std::ofstream torn(path, std::ios::app);
        torn << R"({"id":"c","ter)";
    }
    EXPECT_EQ(read_sink_file(path).size(), 2u);
    {
        NdjsonFileSink s(path);
        EXPECT_EQ(s.size(), 2u);
        EXPECT_FALSE(s.put(rec("b", "[]", 2)));
        EXPECT_TRUE(s.put(rec("c", "[politics#clean]", 4)));
    }
    const auto all = read_sink_file(path);
    ASSERT_EQ(all.size(), 3u);
    EXPECT_EQ(all[2].id, "c");
    EXPECT_EQ(all[0].terms[0].str(), "groups#hate");
}

TEST(Sink, FaultInjectionEventuallyStoresOnce) {
    MemorySink inner;
    FaultInjectingSink faulty(inner, 0.5, 3);
    std::size_t failures = 0;
    for (int i = 0; i < 100; ++i) {
        for (;;) {
            try {
                faulty.put(rec("r" + std::to_string(i), "[]", i));
                break;
            } catch (const Error& e) {
                EXPECT_EQ(e.code(), ErrorCode::SinkFailure);
                ++failures;
            }
        }
    }
    EXPECT_EQ(inner.size(), 100u);
    EXPECT_EQ(faulty.failures(), failures);
    EXPECT_GT(failures, 20u);
}

TEST(Window, HandCountedMinute) {
    const std::int64_t t = 1'700'000'040'000;  // a multiple of 60 s
    const std::vector<PredictionRecord> rs{rec("1", "[individuals#hate]", t + 1000),
                                           rec("2", "[individuals#clean]", t + 20000),
                                           rec("3", "[groups#hate, individuals#hate]", t + 59999)};
    const auto ws = window_aggregate(rs);
    ASSERT_EQ(ws.size(), 1u);
    EXPECT_EQ(ws[0].window_start, t);
    EXPECT_EQ(ws[0].count(Target::Individuals, HatredLevel::Clean), 1u);
    EXPECT_EQ(ws[0].count(Target::Individuals, HatredLevel::Hate), 2u);
    EXPECT_EQ(ws[0].count(Target::Groups, HatredLevel::Hate), 1u);
    EXPECT_EQ(ws[0].total(), 4u);
    EXPECT_TRUE(window_aggregate(std::vector<PredictionRecord>{}).empty());
}

TEST(Window, StartAlignmentHandlesNegatives) {
    EXPECT_EQ(window_start_of(0, 60000), 0);
    EXPECT_EQ(window_start_of(59999, 60000), 0);
    EXPECT_EQ(window_start_of(60000, 60000), 60000);
    EXPECT_EQ(window_start_of(-1, 60000), -60000);
}

TEST(Window, ConservationAndLateness) {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::int64_t> jitter(-200000, 30000);
    std::vector<PredictionRecord> rs;
    std::int64_t clock = 0;
    for (int i = 0; i < 2000; ++i) {
        clock += 1000;
        PredictionRecord r = rec("r" + std::to_string(i), "[]", std::max<std::int64_t>(0, clock + jitter(rng)));
        r.terms = fixtures::random_terms(rng, 0.5);
        rs.push_back(r);
    }
    EXPECT_EQ(cell_total(window_aggregate(rs)), term_total(rs));

    WindowAggregator agg(60, 2);
    std::size_t diverted = 0;
    for (const auto& r : rs) diverted += !agg.add(r);
    EXPECT_EQ(diverted, agg.late().size());
    EXPECT_GT(diverted, 0u);
    EXPECT_EQ(cell_total(agg.windows()) + term_total(agg.late()), term_total(rs));
    for (const auto& w : agg.windows()) EXPECT_EQ(w.window_start % 60000, 0);
}

TEST(Window, LateBoundaryIsTwoWidths) {
    WindowAggregator agg(60, 2);
    EXPECT_TRUE(agg.add(rec("a", "[groups#hate]", 120000)));
    EXPECT_TRUE(agg.add(rec("b", "[groups#hate]", 60001)));  // window 60000, watermark 120000 < 180000
    EXPECT_FALSE(agg.add(rec("c", "[groups#hate]", 59999)));  // window 0, 120000 >= 120000
    EXPECT_EQ(agg.watermark(), std::optional<std::int64_t>(120000));
}

TEST(Window, CsvHasEveryCell) {
    const std::vector<PredictionRecord> rs{rec("1", "[politics#offensive]", 0)};
    const auto ws = window_aggregate(rs);
    const auto csv = windows_csv(ws);
    EXPECT_EQ(csv.rfind("window_start,target,level,count\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 16);
    EXPECT_NE(csv.find("0,politics,offensive,1"), std::string::npos);
}

TEST(Latency, QuartetFixture) {
    std::vector<PredictionRecord> rs;
    for (double v : {300.0, 100.0, 400.0, 200.0}) rs.push_back(rec("x" + std::to_string(int(v)), "[]", 0, v));
    const auto r = latency_report(rs);
    ASSERT_EQ(r.rows.size(), 1u);
    const auto& s = r.rows[0];
    EXPECT_EQ(s.count, 4u);
    EXPECT_EQ(s.min, 100.0);
    EXPECT_EQ(s.q25, 100.0);
    EXPECT_EQ(s.median, 200.0);
    EXPECT_EQ(s.q75, 300.0);
    EXPECT_EQ(s.max, 400.0);
    EXPECT_DOUBLE_EQ(s.mean, 250.0);

    const auto single = latency_stats("m", {200.0});
    for (double v : {single.min, single.q25, single.median, single.mean, single.q75, single.max}) EXPECT_EQ(v, 200.0);
    EXPECT_EQ(code_of_throw([] { latency_report(std::vector<PredictionRecord>{}); }), ErrorCode::EmptyInput);
}

TEST(Latency, OneRowPerModelWithOrdering) {
    std::mt19937_64 rng(1);
    std::exponential_distribution<double> lat(0.1);
    std::vector<PredictionRecord> rs;
    for (int i = 0; i < 300; ++i) {
        auto r = rec("i" + std::to_string(i), "[]", 0, lat(rng));
        r.model = i % 3 == 0 ? "b-model" : "a-model";
        rs.push_back(r);
    }
    const auto rep = latency_report(rs);
    ASSERT_EQ(rep.rows.size(), 2u);
    EXPECT_EQ(rep.rows[0].model, "a-model");
    for (const auto& s : rep.rows) {
        EXPECT_LE(s.min, s.q25);
        EXPECT_LE(s.q25, s.median);
        EXPECT_LE(s.median, s.q75);
        EXPECT_LE(s.q75, s.max);
        EXPECT_GE(s.mean, s.min);
        EXPECT_LE(s.mean, s.max);
    }
    const auto table = format_latency_table(rep);
    EXPECT_NE(table.find("Median"), std::string::npos);
    EXPECT_EQ(to_json(rep)["unit"], "ms");
}

TEST(Pipeline, EmptySourceGivesEmptyOutputs) {
    ReplaySource src({}, kUnthrottled);
    KeywordPredictor pred;
    MemorySink sink;
    const auto r = run_pipeline(src, pred, sink, fast_config());
    EXPECT_EQ(r.source_count, 0u);
    EXPECT_EQ(sink.size(), 0u);
    EXPECT_TRUE(r.windows.empty());
    EXPECT_FALSE(r.latency.has_value());
}

TEST(Pipeline, EveryCommentStoredOnceInPartitionOrder) {
    const auto comments = fixtures::timed_comments(400, 1'700'000'000'000, 250, 5);
    ReplaySource src(comments, kUnthrottled);
    KeywordPredictor pred;
    MemorySink sink;
    LogBroker broker;
    PipelineHooks hooks;
    hooks.broker = &broker;
    const auto r = run_pipeline(src, pred, sink, fast_config(), hooks);
    EXPECT_EQ(r.source_count, 400u);
    EXPECT_EQ(r.stored, 400u);
    EXPECT_EQ(sink.size(), 400u);

    std::set<std::string> ids;
    std::map<std::uint32_t, std::uint64_t> last;
    for (const auto& rec : sink.records()) {
        ids.insert(rec.id);
        auto it = last.find(rec.partition);
        if (it != last.end()) EXPECT_LT(it->second, rec.offset);
        last[rec.partition] = rec.offset;
        EXPECT_GE(rec.latency_ms, 0.0);
    }
    EXPECT_EQ(ids.size(), 400u);
    EXPECT_EQ(cell_total(r.windows) + term_total(r.late), term_total(r.records));
    ASSERT_TRUE(r.latency.has_value());
    EXPECT_EQ(r.latency->rows[0].count, 400u);

    // Predictions went back out on their input's partition.
    for (std::uint32_t p = 0; p < 4; ++p) {
        for (const auto& m : broker.read("predictions", p)) {
            EXPECT_EQ(key_hash(m.key) % 4, p);
        }
    }
}

TEST(Pipeline, CrashesAndSinkFaultsStillExactlyOnce) {
    const auto comments = fixtures::timed_comments(600, 1'700'000'000'000, 100, 6);
    ReplaySource src(comments, kUnthrottled);
    KeywordPredictor pred;
    MemorySink inner;
    FaultInjectingSink sink(inner, 0.1, 11);
    auto cfg = fast_config();
    cfg.worker_crash_rate = 0.05;
    cfg.workers = 3;
    cfg.poll_batch = 8;
    const auto r = run_pipeline(src, pred, sink, cfg);
    EXPECT_GT(r.worker_restarts, 0u);
    EXPECT_GT(r.sink_failures, 0u);
    EXPECT_EQ(inner.size(), 600u);
    std::set<std::string> ids;
    for (const auto& x : inner.records()) ids.insert(x.id);
    EXPECT_EQ(ids.size(), 600u);
    EXPECT_EQ(r.records.size(), 600u);
    std::uint64_t expected_terms = 0;
    for (const auto& c : comments) expected_terms += label_vector_to_terms(pred.predict(c).labels).size();
    EXPECT_EQ(cell_total(r.windows) + term_total(r.late), expected_terms);
}

TEST(Pipeline, ClassifierFailuresGoToDeadLetters) {
    const auto comments = fixtures::timed_comments(50, 0, 1000, 7);
    ReplaySource src(comments, kUnthrottled);
    KeywordPredictor pred({"m3", "m17"});
    MemorySink sink;
    fixtures::TempDir dir;
    DeadLetterFile dl((dir / "dead.jsonl").string());
    PipelineHooks hooks;
    hooks.dead_letters = &dl;
    const auto r = run_pipeline(src, pred, sink, fast_config(), hooks);
    EXPECT_EQ(r.dead_lettered, 2u);
    EXPECT_EQ(sink.size(), 48u);
    EXPECT_EQ(dl.count(), 2u);
    std::ifstream in(dir / "dead.jsonl");
    std::string line;
    std::set<std::string> dead;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        dead.insert(j.at("id"));
        EXPECT_NE(j.at("error").get<std::string>().find("refusing"), std::string::npos);
    }
    EXPECT_EQ(dead, (std::set<std::string>{"m3", "m17"}));
}

TEST(Pipeline, MonitorTracksRun) {
    ReplaySource src(fixtures::timed_comments(30, 0, 1000, 8), kUnthrottled);
    KeywordPredictor pred;
    MemorySink sink;
    PipelineMonitor mon;
    PipelineHooks hooks;
    hooks.monitor = &mon;
    run_pipeline(src, pred, sink, fast_config(), hooks);
    EXPECT_EQ(mon.count(), 30u);
    EXPECT_TRUE(mon.latency().has_value());
}

TEST(Pipeline, ConfigValidation) {
    PipelineConfig c;
    EXPECT_NO_THROW(c.validate());
    c.partitions = 0;
    EXPECT_EQ(code_of_throw([&] { c.validate(); }), ErrorCode::InvalidConfig);
    c = PipelineConfig{};
    c.workers = 0;
    EXPECT_EQ(code_of_throw([&] { c.validate(); }), ErrorCode::InvalidConfig);
    const auto parsed = PipelineConfig::from_json({{"partitions", 8}, {"workers", 3}});
    EXPECT_EQ(parsed.partitions, 8u);
    EXPECT_EQ(parsed.workers, 3u);
}
