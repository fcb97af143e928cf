#include <gtest/gtest.h>
#include <httplib.h>

#include <fstream>
#include <thread>

#include "synthetic.hpp"
#include "vithsd/annotation/annotation_io.hpp"
#include "vithsd/classifier/model_io.hpp"
#include "vithsd/classifier/predictor.hpp"
#include "vithsd/core/errors.hpp"
#include "vithsd/service/config.hpp"
#include "vithsd/service/http_service.hpp"
#include "vithsd/service/round_store.hpp"

using namespace vithsd;
using namespace vithsd::service;
using json = nlohmann::json;

namespace {

std::vector<Comment> batch(std::size_t n) {
    std::vector<Comment> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back({"c" + std::to_string(i), "comment " + std::to_string(i), std::nullopt, ""});
    return out;
}

json round_body(const std::string& id, const std::vector<Comment>& cs, const json& annotators, int per_comment = 2) {
    json comments = json::array();
    for (const auto& c : cs) comments.push_back({{"id", c.id}, {"text", c.text}});
    return {{"id", id}, {"comments", comments}, {"annotators", annotators}, {"annotators_per_comment", per_comment}};
}

json annotation_body(const std::string& round, const annotation::AnnotationRecord& r) {
    auto j = annotation::to_json(r);
    j["round_id"] = round;
    return j;
}

class Service : public ::testing::Test {
protected:
    void start(std::shared_ptr<classifier::Predictor> pred = nullptr, std::string data_dir = "") {
        ServiceConfig cfg;
        cfg.port = 0;
        cfg.data_dir = std::move(data_dir);
        svc_ = std::make_unique<HttpService>(cfg, std::move(pred));
        port_ = svc_->start();
        client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
        client_->set_read_timeout(10, 0);
    }
    void TearDown() override {
        client_.reset();
        if (svc_) svc_->stop();
    }
    httplib::Result post(const std::string& path, const json& body, const std::string& token = "") {
        httplib::Headers h;
        if (!token.empty()) h.emplace("Authorization", "Bearer " + token);
        return client_->Post(path, h, body.dump(), "application/json");
    }
    httplib::Result get(const std::string& path) { return client_->Get(path); }
    static json body(const httplib::Result& r) { return json::parse(r->body); }

    void create_passing_round(const std::string& id, std::size_t agree) {
        const auto cs = batch(80);
        ASSERT_EQ(post("/rounds", round_body(id, cs, {"ann-a", "ann-b"}))->status, 201);
        for (const auto& r : fixtures::two_annotator_records(80, agree, cs)) {
            const auto res = post("/annotations", annotation_body(id, r));
            ASSERT_EQ(res->status, 201) << res->body;
        }
    }

    std::unique_ptr<HttpService> svc_;
    std::unique_ptr<httplib::Client> client_;
    int port_ = 0;
};

}  // namespace

TEST(ServiceStatus, ErrorMapping) {
    EXPECT_EQ(http_status_for(ErrorCode::UnknownRound), 404);
    EXPECT_EQ(http_status_for(ErrorCode::InvalidTransition), 409);
    EXPECT_EQ(http_status_for(ErrorCode::InvalidLevel), 422);
    EXPECT_EQ(http_status_for(ErrorCode::ParseError), 400);
    EXPECT_EQ(http_status_for(ErrorCode::Unauthorized), 401);
    EXPECT_EQ(http_status_for(ErrorCode::ClassifierFailure), 503);
    EXPECT_EQ(http_status_for(ErrorCode::IoError), 500);
}

TEST(ServiceConfigTest, ValidationAndJson) {
    ServiceConfig c;
    EXPECT_NO_THROW(c.validate());
    c.kappa_threshold = 1.0;
    EXPECT_THROW(c.validate(), Error);
    c = ServiceConfig{};
    c.partitions = 0;
    EXPECT_THROW(c.validate(), Error);
    const auto parsed = ServiceConfig::from_json(
        {{"bind", "0.0.0.0"}, {"port", 9001}, {"rounds", {{"kappa_threshold", 0.5}}}, {"streaming", {{"workers", 4}}}});
    EXPECT_EQ(parsed.port, 9001);
    EXPECT_EQ(parsed.kappa_threshold, 0.5);
    EXPECT_EQ(parsed.workers, 4u);
    EXPECT_EQ(ServiceConfig::from_json(parsed.to_json()).to_json(), parsed.to_json());
}

TEST_F(Service, LevelFiveIsUnprocessable) {
    start();
    ASSERT_EQ(post("/rounds", round_body("r", batch(2), {"a", "b"}))->status, 201);
    const auto res = post("/annotations",
                          {{"round_id", "r"}, {"annotator_id", "a"}, {"comment_id", "c0"}, {"labels", {5, 0, 0, 0, 0}}});
    EXPECT_EQ(res->status, 422);
    EXPECT_EQ(body(res)["error"], "InvalidLevel");
}

TEST_F(Service, UnknownRoundAndMalformedBody) {
    start();
    EXPECT_EQ(get("/rounds/nope")->status, 404);
    EXPECT_EQ(post("/rounds/nope/gate", json::object())->status, 404);
    EXPECT_EQ(client_->Post("/rounds", "{not json", "application/json")->status, 400);
    ASSERT_EQ(post("/rounds", round_body("r", batch(2), {"a"}))->status, 201);
    EXPECT_EQ(post("/rounds", round_body("r", batch(2), {"a"}))->status, 409);
    const auto unknown_annotator = post(
        "/annotations", {{"round_id", "r"}, {"annotator_id", "zed"}, {"comment_id", "c0"}, {"labels", {0, 0, 0, 0, 0}}});
    EXPECT_EQ(unknown_annotator->status, 422);
}

TEST_F(Service, SingleAnnotatorAgreementIsOk) {
    start();
    ASSERT_EQ(post("/rounds", round_body("solo", batch(3), {"only"}, 1))->status, 201);
    for (int i = 0; i < 3; ++i) {
        ASSERT_EQ(post("/annotations", {{"round_id", "solo"},
                                        {"annotator_id", "only"},
                                        {"comment_id", "c" + std::to_string(i)},
                                        {"labels", {1, 0, 0, 0, 0}}})
                      ->status,
                  201);
    }
    const auto res = get("/rounds/solo/agreement");
    ASSERT_EQ(res->status, 200);
    const auto j = body(res);
    EXPECT_TRUE(j["with_levels"]["pairs"].empty());
    EXPECT_TRUE(j["without_levels"]["pairs"].empty());
}

TEST_F(Service, GatePassesAtPointFourFiveThenVotes) {
    start();
    create_passing_round("main", 58);
    EXPECT_EQ(post("/rounds/main/vote", json::object())->status, 409);
    const auto g = post("/rounds/main/gate", json::object());
    ASSERT_EQ(g->status, 200) << g->body;
    EXPECT_EQ(body(g)["status"], "Passed");
    EXPECT_NEAR(body(g)["overall_kappa"].get<double>(), 0.45, 1e-12);
    EXPECT_EQ(body(get("/rounds/main"))["status"], "Passed");
    const auto v = post("/rounds/main/vote", json::object());
    ASSERT_EQ(v->status, 200);
    EXPECT_EQ(body(v)["votes"].size(), 80u);
    const auto late = post("/annotations", annotation_body("main", {"ann-a", "c0", LabelVector(), 0}));
    EXPECT_EQ(late->status, 409);
}

TEST_F(Service, GateReviseAndReopen) {
    start();
    const auto cs = batch(400);
    ASSERT_EQ(post("/rounds", round_body("low", cs, {"ann-a", "ann-b"}))->status, 201);
    for (const auto& r : fixtures::two_annotator_records(400, 278, cs)) {
        ASSERT_EQ(post("/annotations", annotation_body("low", r))->status, 201);
    }
    const auto g = post("/rounds/low/gate", json::object());
    EXPECT_EQ(body(g)["status"], "Revise");
    EXPECT_EQ(post("/rounds/low/vote", json::object())->status, 409);
    const auto re = post("/rounds/low/reopen", {{"new_id", "low-2"}});
    EXPECT_EQ(re->status, 201);
    EXPECT_EQ(body(get("/rounds/low-2"))["status"], "Open");
}

TEST_F(Service, IndeterminateGateLeavesRoundOpen) {
    start();
    ASSERT_EQ(post("/rounds", round_body("gap", batch(3), {"a", "b"}))->status, 201);
    // Perfect agreement on c0 and c1, nothing on c2.
    for (const std::string a : {"a", "b"}) {
        post("/annotations", {{"round_id", "gap"}, {"annotator_id", a}, {"comment_id", "c0"}, {"labels", {1, 0, 0, 0, 0}}});
        post("/annotations", {{"round_id", "gap"}, {"annotator_id", a}, {"comment_id", "c1"}, {"labels", {0, 0, 0, 0, 0}}});
    }
    const auto g = post("/rounds/gap/gate", json::object());
    EXPECT_EQ(g->status, 409);
    EXPECT_EQ(body(g)["error"], "GateIndeterminate");
    EXPECT_EQ(body(get("/rounds/gap"))["status"], "Open");
}

TEST_F(Service, BearerTokensAreChecked) {
    start();
    ASSERT_EQ(post("/rounds", round_body("t", batch(2), json::array({{{"id", "a"}, {"token", "sekrit"}}, "b"})))->status,
              201);
    const json rec{{"round_id", "t"}, {"annotator_id", "a"}, {"comment_id", "c0"}, {"labels", {0, 0, 0, 0, 0}}};
    EXPECT_EQ(post("/annotations", rec)->status, 401);
    EXPECT_EQ(post("/annotations", rec, "wrong")->status, 401);
    EXPECT_EQ(post("/annotations", rec, "sekrit")->status, 201);
    json other = rec;
    other["annotator_id"] = "b";
    EXPECT_EQ(post("/annotations", other)->status, 201);
}

TEST_F(Service, TasksFollowAssignment) {
    start();
    ASSERT_EQ(post("/rounds", round_body("tk", batch(6), {"a", "b", "c"}))->status, 201);
    const auto res = get("/rounds/tk/tasks?annotator=a&limit=2");
    ASSERT_EQ(res->status, 200);
    const auto tasks = body(res)["tasks"];
    ASSERT_EQ(tasks.size(), 2u);
    const std::string first = tasks[0]["id"];
    post("/annotations", {{"round_id", "tk"}, {"annotator_id", "a"}, {"comment_id", first}, {"labels", {0, 0, 0, 0, 0}}});
    const auto after = body(get("/rounds/tk/tasks?annotator=a"))["tasks"];
    for (const auto& t : after) EXPECT_NE(t["id"], first);
    EXPECT_EQ(get("/rounds/tk/tasks")->status, 400);
}

TEST_F(Service, PredictWithoutModelIs503) {
    start();
    EXPECT_EQ(post("/predict", {{"id", "x"}, {"text", "hello"}})->status, 503);
}

TEST_F(Service, PredictMatchesWireContract) {
    auto model = std::make_shared<classifier::MultiHeadLinearModel>(64);
    model->params.head_bias(0, 3) = 5.0;
    start(std::make_shared<classifier::LocalPredictor>(model));
    const auto res = post("/predict", {{"id", "p1"}, {"text", "anh ấy"}});
    ASSERT_EQ(res->status, 200);
    const auto out = classifier::prediction_from_wire(body(res), "p1");
    EXPECT_EQ(out.labels, LabelVector::from_codes({3, 0, 0, 0, 0}));
    EXPECT_EQ(post("/predict", {{"id", "p2"}, {"text", "   "}})->status, 422);
}

TEST_F(Service, StreamRunReportsLatencyAndAggregates) {
    auto model = std::make_shared<classifier::MultiHeadLinearModel>(64);
    model->params.head_bias(1, 1) = 5.0;
    start(std::make_shared<classifier::LocalPredictor>(model));
    fixtures::TempDir dir;
    fixtures::write_replay_file(dir / "replay.jsonl", fixtures::timed_comments(120, 1'700'000'000'000, 1000, 3));
    const auto res = post("/stream/runs", {{"replay", (dir / "replay.jsonl").string()}, {"speed", "max"}});
    ASSERT_EQ(res->status, 202) << res->body;
    svc_->wait_for_stream();
    const auto status = body(get("/stream/status"));
    EXPECT_EQ(status["running"], false);
    const auto lat = body(get("/stream/latency"));
    ASSERT_EQ(lat["models"].size(), 1u);
    EXPECT_EQ(lat["models"][0]["count"], 120);
    const auto agg = body(get("/stream/aggregates"));
    std::uint64_t cells = 0;
    for (const auto& w : agg["windows"])
        for (const auto& [target, levels] : w["counts"].items())
            for (const auto& [level, n] : levels.items()) cells += n.get<std::uint64_t>();
    // every comment carries exactly one groups#clean term
    EXPECT_EQ(cells + agg["late_records"].get<std::uint64_t>(), 120u);
    const auto csv = get("/stream/aggregates?format=csv");
    EXPECT_EQ(csv->body.rfind("window_start,target,level,count", 0), 0u);
}

TEST_F(Service, ConcurrentSubmissionsStayConsistent) {
    start();
    const auto cs = batch(40);
    ASSERT_EQ(post("/rounds", round_body("busy", cs, {"a", "b", "c", "d"}, 4))->status, 201);
    std::vector<std::thread> threads;
    std::atomic<int> created{0};
    for (const std::string ann : {"a", "b", "c", "d"}) {
        threads.emplace_back([&, ann] {
            httplib::Client c("127.0.0.1", port_);
            for (int rep = 0; rep < 3; ++rep) {
                for (const auto& cm : cs) {
                    json b{{"round_id", "busy"}, {"annotator_id", ann}, {"comment_id", cm.id}, {"labels", {rep, 0, 0, 0, 0}}};
                    const auto r = c.Post("/annotations", b.dump(), "application/json");
                    if (r && r->status == 201) ++created;
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    EXPECT_EQ(created.load(), 4 * 3 * 40);
    const auto snap = body(get("/rounds/busy"));
    EXPECT_EQ(snap["record_count"], 160);
    for (const auto& r : body(get("/rounds/busy/records"))["records"]) EXPECT_EQ(r["labels"][0], 2);
}

TEST(ServiceRestart, JournalReproducesRoundsAndAgreement) {
    fixtures::TempDir dir;
    const auto cs = batch(80);
    json before_snap, before_agree, before_low;
    {
        RoundStore store(dir.path());
        RoundSpec spec;
        spec.id = "r1";
        spec.comments = cs;
        spec.roster = {"ann-a", "ann-b"};
        spec.annotators_per_comment = 2;
        spec.kappa_threshold = 0.4;
        store.create(spec);
        for (const auto& r : fixtures::two_annotator_records(80, 58, cs)) store.submit("r1", r);
        store.gate("r1");
        spec.id = "r2";
        store.create(spec);
        store.submit("r2", {"ann-a", "c0", LabelVector::from_codes({1, 2, 0, 0, 0}), 5});
        before_snap = store.snapshot("r1");
        before_low = store.snapshot("r2");
        before_agree = annotation::to_json(store.agreement("r1", annotation::AgreementMode::Presence));
    }
    RoundStore again(dir.path());
    EXPECT_EQ(again.snapshot("r1"), before_snap);
    EXPECT_EQ(again.snapshot("r2"), before_low);
    EXPECT_EQ(annotation::to_json(again.agreement("r1", annotation::AgreementMode::Presence)), before_agree);
    EXPECT_EQ(again.votes("r1").size(), 80u);
    EXPECT_EQ(again.records("r2")[0].submitted_at, 5);
}

TEST(ServiceRestart, HttpServiceOverDataDir) {
    fixtures::TempDir dir;
    ServiceConfig cfg;
    cfg.port = 0;
    cfg.data_dir = dir.path().string();
    std::string first;
    {
        HttpService svc(cfg);
        httplib::Client c("127.0.0.1", svc.start());
        json comments = json::array({{{"id", "c0"}, {"text", "x"}}});
        ASSERT_EQ(c.Post("/rounds", json{{"id", "keep"}, {"comments", comments}, {"annotators", {"a"}}}.dump(),
                         "application/json")
                      ->status,
                  201);
        c.Post("/annotations",
               json{{"round_id", "keep"}, {"annotator_id", "a"}, {"comment_id", "c0"}, {"labels", {2, 0, 0, 0, 0}}}.dump(),
               "application/json");
        first = c.Get("/rounds/keep")->body;
        svc.stop();
    }
    HttpService svc(cfg);
    httplib::Client c("127.0.0.1", svc.start());
    EXPECT_EQ(c.Get("/rounds/keep")->body, first);
    svc.stop();
}
