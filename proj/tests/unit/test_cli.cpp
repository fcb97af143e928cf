#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "synthetic.hpp"
#include "vithsd/core/dataset.hpp"
#include "vithsd/core/labels.hpp"
#include "vithsd/metrics/report.hpp"
#include "vithsd/metrics/stats.hpp"

#ifndef VITHSD_CLI_PATH
#error "VITHSD_CLI_PATH must point at the built vithsd binary"
#endif

using namespace vithsd;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(VITHSD_CLI_PATH) + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

RunResult run_with_stderr(const std::string& args) {
    const std::string cmd = std::string(VITHSD_CLI_PATH) + " " + args + " 2>&1";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string quoted(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST(Cli, EvaluateMatchesLibraryByteForByte) {
    fixtures::TempDir dir;
    const auto gold = fixtures::keyword_corpus(150, 31);
    write_dataset(dir / "gold.csv", gold);

    std::mt19937_64 rng(3);
    std::vector<metrics::IdTerms> preds;
    {
        std::ofstream out(dir / "pred.jsonl");
        // reversed order: the tool must align by id
        for (auto it = gold.rbegin(); it != gold.rend(); ++it) {
            const auto terms = fixtures::random_terms(rng, 0.4);
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& t : terms) arr.push_back(t.str());
            out << nlohmann::json{{"id", it->comment.id}, {"terms", arr}}.dump() << "\n";
            preds.push_back({it->comment.id, terms});
        }
    }
    const auto reloaded = load_dataset(dir / "gold.csv");
    const auto report = metrics::evaluate_predictions("hash-linear", preds, reloaded);
    const auto expected = metrics::format_table(report);

    const auto r = run("evaluate --pred " + quoted(dir / "pred.jsonl") + " --gold " + quoted(dir / "gold.csv") +
                       " --name hash-linear --json " + quoted(dir / "report.json"));
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.out, expected);
    std::ifstream js(dir / "report.json");
    EXPECT_EQ(nlohmann::json::parse(js), metrics::to_json(report));
}

TEST(Cli, DatasetStatsMatchesLibrary) {
    fixtures::TempDir dir;
    const auto data = fixtures::keyword_corpus(60, 2);
    write_dataset(dir / "train.csv", data);
    const auto r = run("dataset stats --input " + quoted(dir / "train.csv"));
    ASSERT_EQ(r.exit_code, 0);
    const auto stats = metrics::dataset_stats(load_dataset(dir / "train.csv"));
    EXPECT_EQ(r.out, metrics::format_stats_table({{"train", stats}}));
}

TEST(Cli, VoteOnEmptyFileFails) {
    fixtures::TempDir dir;
    { std::ofstream(dir / "empty.csv"); }
    const auto r = run_with_stderr("vote --records " + quoted(dir / "empty.csv"));
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.out.find("EmptyInput"), std::string::npos) << r.out;
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run("--no-such-flag").exit_code, 2);
    EXPECT_EQ(run("").exit_code, 2);
    EXPECT_EQ(run("bogus-command").exit_code, 2);
    EXPECT_EQ(run("evaluate --pred x.jsonl").exit_code, 2);
    EXPECT_EQ(run("--help").exit_code, 0);
}

TEST(Cli, ModuleErrorsExitOne) {
    EXPECT_EQ(run("evaluate --pred /nonexistent/p.jsonl --gold /nonexistent/g.csv").exit_code, 1);
}

TEST(Cli, TrainPredictEvaluateRoundTrip) {
    fixtures::TempDir dir;
    write_dataset(dir / "train.csv", fixtures::keyword_corpus(300, 41));
    write_dataset(dir / "test.csv", fixtures::keyword_corpus(80, 42));
    ASSERT_EQ(run("train --train " + quoted(dir / "train.csv") + " --out " + quoted(dir / "m.bin") +
                  " --dim 4096 --epochs 3 --quiet")
                  .exit_code,
              0);
    ASSERT_EQ(run("predict --model " + quoted(dir / "m.bin") + " --input " + quoted(dir / "test.csv") + " --out " +
                  quoted(dir / "p.jsonl"))
                  .exit_code,
              0);
    const auto r = run("evaluate --pred " + quoted(dir / "p.jsonl") + " --gold " + quoted(dir / "test.csv"));
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("Target only"), std::string::npos);
}

TEST(Cli, StreamReplayWritesSinkAndReports) {
    fixtures::TempDir dir;
    write_dataset(dir / "train.csv", fixtures::keyword_corpus(200, 43));
    ASSERT_EQ(run("train --train " + quoted(dir / "train.csv") + " --out " + quoted(dir / "m.bin") +
                  " --dim 1024 --epochs 2 --quiet")
                  .exit_code,
              0);
    fixtures::write_replay_file(dir / "replay.jsonl", fixtures::timed_comments(100, 1'700'000'000'000, 500, 4));
    const auto r = run("stream replay --input " + quoted(dir / "replay.jsonl") + " --model " + quoted(dir / "m.bin") +
                       " --sink " + quoted(dir / "sink.jsonl") + " --aggregates " + quoted(dir / "agg.csv") +
                       " --latency " + quoted(dir / "lat.json"));
    ASSERT_EQ(r.exit_code, 0);
    std::ifstream sink(dir / "sink.jsonl");
    std::size_t lines = 0;
    std::string line;
    while (std::getline(sink, line)) ++lines;
    EXPECT_EQ(lines, 100u);
    std::ifstream lat(dir / "lat.json");
    EXPECT_EQ(nlohmann::json::parse(lat)["unit"], "ms");
    std::ifstream agg(dir / "agg.csv");
    std::getline(agg, line);
    EXPECT_EQ(line, "window_start,target,level,count");
}
