#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>

#include <json.hpp>

#include "commands.hpp"
#include "vithsd/classifier/model_io.hpp"
#include "vithsd/classifier/remote.hpp"
#include "vithsd/core/errors.hpp"
#include "vithsd/service/http_service.hpp"
#include "vithsd/streaming/pipeline.hpp"

namespace vithsd::cli {

namespace {

struct StreamJob {
    std::unique_ptr<streaming::SourceAdapter> source;
    std::string model_path;
    std::string endpoint;
    std::chrono::milliseconds timeout{2000};
    std::string sink_path;
    bool fsync = false;
    std::string dead_letter_path;
    std::string aggregates_csv;
    std::string latency_json;
    std::string report_json;
    streaming::PipelineConfig pipeline;
};

double parse_speed(const std::string& s) {
    if (s == "max" || s == "inf") return streaming::kUnthrottled;
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        raise(ErrorCode::InvalidConfig, "bad speed '" + s + "'");
    }
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot write '" + path + "'");
    out << content;
}

std::unique_ptr<classifier::Predictor> make_predictor(const StreamJob& job) {
    if (!job.model_path.empty() && !job.endpoint.empty()) {
        raise(ErrorCode::InvalidConfig, "choose a local model or a remote endpoint, not both");
    }
    if (!job.endpoint.empty()) {
        auto ep = classifier::RemoteEndpoint::parse(job.endpoint);
        ep.timeout = job.timeout;
        return std::make_unique<classifier::RemotePredictor>(ep, "remote@" + ep.str());
    }
    if (job.model_path.empty()) raise(ErrorCode::InvalidConfig, "a model or an endpoint is required");
    auto model = std::make_shared<const classifier::MultiHeadLinearModel>(
        classifier::load_model(std::filesystem::path(job.model_path)));
    return std::make_unique<classifier::LocalPredictor>(model);
}

void run_job(StreamJob& job) {
    auto predictor = make_predictor(job);
    std::unique_ptr<streaming::RecordSink> sink;
    if (job.sink_path.empty()) sink = std::make_unique<streaming::MemorySink>();
    else sink = std::make_unique<streaming::NdjsonFileSink>(job.sink_path, job.fsync);
    std::unique_ptr<streaming::DeadLetterFile> dead;
    streaming::PipelineHooks hooks;
    if (!job.dead_letter_path.empty()) {
        dead = std::make_unique<streaming::DeadLetterFile>(job.dead_letter_path);
        hooks.dead_letters = dead.get();
    }
    const auto report = streaming::run_pipeline(*job.source, *predictor, *sink, job.pipeline, hooks);

    std::cout << "source: " << job.source->describe() << "\n"
              << "published " << report.published << ", stored " << report.stored << ", duplicates absorbed "
              << report.duplicates_absorbed << ", dead-lettered " << report.dead_lettered << ", late "
              << report.late.size() << "\n";
    if (report.latency) std::cout << "\n" << streaming::format_latency_table(*report.latency);
    if (!job.aggregates_csv.empty()) write_text(job.aggregates_csv, streaming::windows_csv(report.windows));
    if (!job.latency_json.empty()) {
        write_text(job.latency_json,
                   (report.latency ? streaming::to_json(*report.latency) : nlohmann::json(nullptr)).dump(2) + "\n");
    }
    if (!job.report_json.empty()) write_text(job.report_json, report.to_json().dump(2) + "\n");
}

StreamJob job_from_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot read stream config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::InvalidConfig, path + ": " + e.what());
    }
    StreamJob job;
    try {
        const auto& src = j.at("source");
        const std::string type = src.value("type", "replay");
        if (type == "replay") {
            double speed = streaming::kUnthrottled;
            if (src.contains("speed")) {
                speed = src["speed"].is_string() ? parse_speed(src["speed"]) : src["speed"].get<double>();
            }
            job.source = std::make_unique<streaming::ReplaySource>(
                streaming::ReplaySource::from_file(src.at("path").get<std::string>(), speed));
        } else if (type == "polling") {
            streaming::PollingSourceConfig pc;
            pc.endpoint = src.at("endpoint").get<std::string>();
            pc.interval = std::chrono::milliseconds(src.value("interval_ms", 1000));
            pc.stream_id = src.value("stream_id", "");
            pc.batch_size = src.value("batch_size", std::size_t{50});
            job.source = std::make_unique<streaming::MockPoller>(streaming::MockPoller::from_config(pc));
        } else {
            raise(ErrorCode::InvalidConfig, "unknown source type '" + type + "'");
        }
        const auto& cls = j.at("classifier");
        job.model_path = cls.value("model", "");
        job.endpoint = cls.value("endpoint", "");
        job.timeout = std::chrono::milliseconds(cls.value("timeout_ms", 2000));
        if (j.contains("sink")) {
            job.sink_path = j["sink"].value("path", "");
            job.fsync = j["sink"].value("fsync", false);
        }
        job.dead_letter_path = j.value("dead_letter", "");
        job.aggregates_csv = j.value("aggregates_csv", "");
        job.latency_json = j.value("latency_json", "");
        job.report_json = j.value("report_json", "");
        if (j.contains("pipeline")) job.pipeline = streaming::PipelineConfig::from_json(j["pipeline"]);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::InvalidConfig, path + ": " + e.what());
    }
    return job;
}

}  // namespace

void add_stream_commands(CLI::App& app) {
    auto* stream = app.add_subcommand("stream", "Streaming detection runs");
    stream->require_subcommand(1);
    {
        auto* cmd = stream->add_subcommand("replay", "Replay a recorded comment file through the pipeline");
        auto input = std::make_shared<std::string>();
        auto speed = std::make_shared<std::string>("max");
        auto job = std::make_shared<StreamJob>();
        cmd->add_option("--input", *input, "Replay file: one {\"id\",\"ts\",\"text\"} per line")->required();
        cmd->add_option("--speed", *speed, "Time compression factor, or 'max'")->capture_default_str();
        cmd->add_option("--model", job->model_path, "Local model file");
        cmd->add_option("--endpoint", job->endpoint, "Remote classifier URL");
        cmd->add_option("--sink", job->sink_path, "Prediction lines output file");
        cmd->add_flag("--fsync", job->fsync, "Sync the sink after every write");
        cmd->add_option("--dead-letter", job->dead_letter_path, "Failed-message lines output file");
        cmd->add_option("--aggregates", job->aggregates_csv, "Per-window counts CSV");
        cmd->add_option("--latency", job->latency_json, "Latency report JSON");
        cmd->add_option("--report", job->report_json, "Full run report JSON");
        cmd->add_option("--partitions", job->pipeline.partitions, "Topic partitions")->capture_default_str();
        cmd->add_option("--workers", job->pipeline.workers, "Classification workers")->capture_default_str();
        cmd->add_option("--window", job->pipeline.window_seconds, "Window width in seconds")->capture_default_str();
        cmd->callback([=] {
            job->source = std::make_unique<streaming::ReplaySource>(
                streaming::ReplaySource::from_file(*input, parse_speed(*speed)));
            run_job(*job);
        });
    }
    {
        auto* cmd = stream->add_subcommand("run", "Run a pipeline described by a JSON config");
        auto config = std::make_shared<std::string>();
        cmd->add_option("--config", *config, "Stream config file")->required();
        cmd->callback([=] {
            auto job = job_from_config(*config);
            run_job(job);
        });
    }
}

void add_serve_command(CLI::App& app) {
    auto* cmd = app.add_subcommand("serve", "Run the HTTP service");
    auto config_path = std::make_shared<std::string>();
    auto bind = std::make_shared<std::string>();
    auto port = std::make_shared<int>(-1);
    auto data_dir = std::make_shared<std::string>();
    auto model = std::make_shared<std::string>();
    cmd->add_option("--config", *config_path, "Service config JSON");
    cmd->add_option("--bind", *bind, "Bind address override");
    cmd->add_option("--port", *port, "Port override (0 picks a free port)");
    cmd->add_option("--data-dir", *data_dir, "Data directory override");
    cmd->add_option("--model", *model, "Model file override");
    cmd->callback([=] {
        service::ServiceConfig cfg = config_path->empty() ? service::ServiceConfig{} : service::ServiceConfig::load(*config_path);
        if (!bind->empty()) cfg.bind = *bind;
        if (*port >= 0) cfg.port = *port;
        if (!data_dir->empty()) cfg.data_dir = *data_dir;
        if (!model->empty()) cfg.model_path = *model;
        cfg.validate();

        sigset_t set;
        sigemptyset(&set);
        sigaddset(&set, SIGINT);
        sigaddset(&set, SIGTERM);
        pthread_sigmask(SIG_BLOCK, &set, nullptr);

        service::HttpService svc(cfg);
        const int bound = svc.start();
        std::cout << "listening on " << cfg.bind << ":" << bound << std::endl;
        int sig = 0;
        sigwait(&set, &sig);
        std::cout << "shutting down" << std::endl;
        svc.stop();
    });
}

}  // namespace vithsd::cli
