#include "vithsd/service/http_service.hpp"

#include <httplib.h>

#include <cmath>

#include "vithsd/annotation/annotation_io.hpp"
#include "vithsd/classifier/model_io.hpp"
#include "vithsd/streaming/latency.hpp"
#include "vithsd/streaming/window.hpp"

namespace vithsd::service {

int http_status_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::UnknownRound: return 404;
        case ErrorCode::InvalidTransition:
        case ErrorCode::RoundExists:
        case ErrorCode::GateIndeterminate: return 409;
        case ErrorCode::InvalidLevel:
        case ErrorCode::UnknownTarget:
        case ErrorCode::ConflictingTerm:
        case ErrorCode::UnknownAnnotator:
        case ErrorCode::UnknownComment:
        case ErrorCode::InvalidComment: return 422;
        case ErrorCode::ParseError:
        case ErrorCode::SchemaError:
        case ErrorCode::InvalidConfig:
        case ErrorCode::EmptyInput: return 400;
        case ErrorCode::Unauthorized: return 401;
        case ErrorCode::RemoteTimeout:
        case ErrorCode::ClassifierFailure: return 503;
        default: return 500;
    }
}

nlohmann::json error_body(const Error& e) {
    return {{"error", error_code_name(e.code())}, {"message", e.what()}};
}

namespace {

void send_json(httplib::Response& res, const nlohmann::json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) { send_json(res, error_body(e), http_status_for(e.code())); }

nlohmann::json parse_body(const httplib::Request& req) {
    try {
        return nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::ParseError, std::string("request body is not JSON: ") + e.what());
    }
}

template <typename F>
httplib::Server::Handler guarded(F&& f) {
    return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const Error& e) {
            send_error(res, e);
        } catch (const nlohmann::json::exception& e) {
            send_error(res, Error(ErrorCode::ParseError, e.what()));
        } catch (const std::exception& e) {
            send_json(res, {{"error", "InternalError"}, {"message", e.what()}}, 500);
        }
    };
}

std::optional<std::string> bearer_token(const httplib::Request& req) {
    const auto h = req.get_header_value("Authorization");
    const std::string prefix = "Bearer ";
    if (h.rfind(prefix, 0) != 0) return std::nullopt;
    return h.substr(prefix.size());
}

}  // namespace

HttpService::HttpService(ServiceConfig config, std::shared_ptr<classifier::Predictor> predictor)
    : config_(std::move(config)), predictor_(std::move(predictor)), server_(std::make_unique<httplib::Server>()) {
    config_.validate();
    if (!predictor_ && config_.model_path) {
        auto model = std::make_shared<const classifier::MultiHeadLinearModel>(classifier::load_model(*config_.model_path));
        predictor_ = std::make_shared<classifier::LocalPredictor>(model);
    }
    rounds_ = std::make_unique<RoundStore>(config_.data_dir.empty() ? std::nullopt
                                                                    : std::optional<std::filesystem::path>(config_.data_dir));
    install_routes();
}

HttpService::~HttpService() {
    stop();
    wait_for_stream();
}

void HttpService::install_routes() {
    auto& s = *server_;

    s.Post("/rounds", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto spec = RoundSpec::from_json(parse_body(req), config_.kappa_threshold, config_.annotators_per_comment);
        send_json(res, rounds_->create(spec), 201);
    }));

    s.Get("/rounds", guarded([this](const httplib::Request&, httplib::Response& res) {
        send_json(res, {{"rounds", rounds_->ids()}});
    }));

    s.Get(R"(/rounds/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, rounds_->snapshot(req.matches[1]));
    }));

    s.Get(R"(/rounds/([^/]+)/tasks)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        if (!req.has_param("annotator")) raise(ErrorCode::ParseError, "missing 'annotator' query parameter");
        std::size_t limit = 0;
        if (req.has_param("limit")) {
            try {
                limit = std::stoul(req.get_param_value("limit"));
            } catch (const std::exception&) {
                raise(ErrorCode::ParseError, "bad 'limit' query parameter");
            }
        }
        const auto tasks = rounds_->tasks(req.matches[1], req.get_param_value("annotator"), limit);
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : tasks) arr.push_back({{"id", c.id}, {"text", c.text}});
        send_json(res, {{"round_id", std::string(req.matches[1])}, {"tasks", arr}});
    }));

    s.Get(R"(/rounds/([^/]+)/records)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rounds_->records(req.matches[1])) arr.push_back(annotation::to_json(r));
        send_json(res, {{"records", arr}});
    }));

    s.Post("/annotations", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        if (!body.is_object() || !body.contains("round_id") || !body["round_id"].is_string()) {
            raise(ErrorCode::ParseError, "annotation body needs string 'round_id'");
        }
        const std::string round_id = body["round_id"];
        auto record = annotation::record_from_json(body);
        rounds_->submit(round_id, record, bearer_token(req));
        const auto snap = rounds_->snapshot(round_id);
        send_json(res, {{"round_id", round_id}, {"record_count", snap["record_count"]}}, 201);
    }));

    s.Get(R"(/rounds/([^/]+)/agreement)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        send_json(res, {{"round_id", id},
                        {"with_levels", annotation::to_json(rounds_->agreement(id, annotation::AgreementMode::WithLevels))},
                        {"without_levels", annotation::to_json(rounds_->agreement(id, annotation::AgreementMode::Presence))}});
    }));

    s.Post(R"(/rounds/([^/]+)/gate)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        const auto outcome = rounds_->gate(id);
        auto body = annotation::to_json(outcome);
        body["round_id"] = id;
        send_json(res, body);
    }));

    s.Post(R"(/rounds/([^/]+)/vote)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& v : rounds_->votes(id)) arr.push_back(annotation::to_json(v));
        send_json(res, {{"round_id", id}, {"votes", arr}});
    }));

    s.Post(R"(/rounds/([^/]+)/reopen)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        if (!body.is_object() || !body.contains("new_id") || !body["new_id"].is_string()) {
            raise(ErrorCode::ParseError, "reopen body needs string 'new_id'");
        }
        send_json(res, rounds_->reopen(req.matches[1], body["new_id"]), 201);
    }));

    s.Post("/predict", guarded([this](const httplib::Request& req, httplib::Response& res) {
        if (!predictor_) raise(ErrorCode::ClassifierFailure, "no classifier is loaded");
        const auto body = parse_body(req);
        Comment c;
        if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
            raise(ErrorCode::ParseError, "predict body needs string 'text'");
        }
        c.text = body["text"];
        c.id = body.contains("id") ? (body["id"].is_string() ? body["id"].get<std::string>() : body["id"].dump()) : "";
        if (c.id.empty()) c.id = "request";
        validate_comment(c);
        send_json(res, classifier::prediction_to_wire(predictor_->predict(c)));
    }));

    s.Post("/stream/runs", guarded([this](const httplib::Request& req, httplib::Response& res) {
        if (!predictor_) raise(ErrorCode::ClassifierFailure, "no classifier is loaded");
        const auto body = parse_body(req);
        if (!body.is_object() || !body.contains("replay") || !body["replay"].is_string()) {
            raise(ErrorCode::ParseError, "stream run body needs string 'replay'");
        }
        double speed = streaming::kUnthrottled;
        if (body.contains("speed") && body["speed"].is_number()) speed = body["speed"].get<double>();
        auto comments = streaming::load_replay_file(body["replay"]);
        streaming::PipelineConfig pc;
        pc.partitions = config_.partitions;
        pc.workers = config_.workers;
        if (body.contains("pipeline")) {
            auto merged = body["pipeline"];
            if (!merged.contains("partitions")) merged["partitions"] = pc.partitions;
            if (!merged.contains("workers")) merged["workers"] = pc.workers;
            pc = streaming::PipelineConfig::from_json(merged);
        }
        std::string sink_path;
        if (!config_.data_dir.empty()) sink_path = (std::filesystem::path(config_.data_dir) / "predictions.jsonl").string();
        if (body.contains("sink") && body["sink"].is_string()) sink_path = body["sink"];

        std::lock_guard lock(stream_mu_);
        if (stream_running_) raise(ErrorCode::InvalidTransition, "a stream run is already in progress");
        if (stream_thread_.joinable()) stream_thread_.join();
        stream_running_ = true;
        last_run_error_.reset();
        monitor_.reset(pc.window_seconds, pc.lateness_windows);
        const std::size_t n = comments.size();
        stream_thread_ = std::thread([this, comments = std::move(comments), speed, pc, sink_path]() mutable {
            try {
                streaming::ReplaySource src(std::move(comments), speed);
                std::unique_ptr<streaming::RecordSink> sink;
                if (sink_path.empty()) sink = std::make_unique<streaming::MemorySink>();
                else sink = std::make_unique<streaming::NdjsonFileSink>(sink_path);
                streaming::PipelineHooks hooks;
                hooks.monitor = &monitor_;
                auto report = streaming::run_pipeline(src, *predictor_, *sink, pc, hooks);
                std::lock_guard g(stream_mu_);
                last_run_ = report.to_json();
            } catch (const std::exception& e) {
                std::lock_guard g(stream_mu_);
                last_run_error_ = e.what();
            }
            stream_running_ = false;
        });
        send_json(res, {{"accepted", n}, {"speed", std::isinf(speed) ? nlohmann::json("max") : nlohmann::json(speed)}}, 202);
    }));

    s.Get("/stream/status", guarded([this](const httplib::Request&, httplib::Response& res) {
        send_json(res, stream_status());
    }));

    s.Get("/stream/latency", guarded([this](const httplib::Request&, httplib::Response& res) {
        const auto rep = monitor_.latency();
        send_json(res, rep ? streaming::to_json(*rep) : nlohmann::json{{"unit", "ms"}, {"models", nlohmann::json::array()}});
    }));

    s.Get("/stream/aggregates", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto windows = monitor_.windows();
        if (req.has_param("format") && req.get_param_value("format") == "csv") {
            res.status = 200;
            res.set_content(streaming::windows_csv(windows), "text/csv");
            return;
        }
        send_json(res, {{"windows", streaming::to_json(windows)}, {"late_records", monitor_.late_count()}});
    }));

    s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) {
            res.set_content(nlohmann::json{{"error", "NotFound"}, {"message", "no such endpoint"}}.dump(),
                            "application/json");
        }
    });
}

nlohmann::json HttpService::stream_status() const {
    std::lock_guard lock(stream_mu_);
    nlohmann::json j = {{"running", stream_running_.load()}, {"observed", monitor_.count()}};
    j["last_run"] = last_run_ ? *last_run_ : nlohmann::json(nullptr);
    j["error"] = last_run_error_ ? nlohmann::json(*last_run_error_) : nlohmann::json(nullptr);
    return j;
}

int HttpService::bind() {
    if (config_.port == 0) {
        port_ = server_->bind_to_any_port(config_.bind);
    } else {
        port_ = server_->bind_to_port(config_.bind, config_.port) ? config_.port : -1;
    }
    if (port_ <= 0) raise(ErrorCode::InvalidConfig, "cannot bind " + config_.bind + ":" + std::to_string(config_.port));
    return port_;
}

int HttpService::start() {
    bind();
    server_thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port_;
}

void HttpService::run() {
    bind();
    server_->listen_after_bind();
}

void HttpService::stop() {
    if (server_) server_->stop();
    if (server_thread_.joinable()) server_thread_.join();
}

void HttpService::wait_for_stream() {
    std::thread t;
    {
        std::lock_guard lock(stream_mu_);
        t = std::move(stream_thread_);
    }
    if (t.joinable()) t.join();
}

}  // namespace vithsd::service
