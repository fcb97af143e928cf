#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <json.hpp>

#include "vithsd/classifier/predictor.hpp"
#include "vithsd/core/errors.hpp"
#include "vithsd/service/config.hpp"
#include "vithsd/service/round_store.hpp"
#include "vithsd/streaming/pipeline.hpp"

namespace httplib {
class Server;
}

namespace vithsd::service {

/// HTTP status for a module error: 404 unknown round, 409 lifecycle
/// conflicts, 422 invalid labels or unknown annotator/comment, 400 malformed
/// bodies, 401 bad token, 503 no classifier, 500 otherwise.
int http_status_for(ErrorCode code) noexcept;
nlohmann::json error_body(const Error& e);

/// Endpoints:
///   POST /rounds                     create a round
///   GET  /rounds                     list round ids
///   GET  /rounds/{id}                status, comments, gate state
///   GET  /rounds/{id}/tasks?annotator=&limit=
///   GET  /rounds/{id}/records
///   POST /annotations                {"round_id", "annotator_id", "comment_id", "labels"}
///   GET  /rounds/{id}/agreement      both agreement modes
///   POST /rounds/{id}/gate
///   POST /rounds/{id}/vote           final labels, only once Passed
///   POST /rounds/{id}/reopen         {"new_id"}, only from Revise
///   POST /predict                    classifier wire contract
///   POST /stream/runs                {"replay": path, "speed": x|"max"}
///   GET  /stream/status | /stream/latency | /stream/aggregates[?format=csv]
class HttpService {
public:
    /// Loads config.model_path when set and no predictor is given.
    explicit HttpService(ServiceConfig config, std::shared_ptr<classifier::Predictor> predictor = nullptr);
    ~HttpService();

    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    /// Binds and serves on a background thread; returns the bound port.
    int start();
    /// Binds and serves on the calling thread until stop().
    void run();
    void stop();
    int port() const noexcept { return port_; }

    RoundStore& rounds() noexcept { return *rounds_; }
    streaming::PipelineMonitor& monitor() noexcept { return monitor_; }
    /// Blocks until a background stream run finishes.
    void wait_for_stream();

private:
    void install_routes();
    int bind();
    nlohmann::json stream_status() const;

    ServiceConfig config_;
    std::shared_ptr<classifier::Predictor> predictor_;
    std::unique_ptr<RoundStore> rounds_;
    std::unique_ptr<httplib::Server> server_;
    std::thread server_thread_;
    int port_ = 0;

    streaming::PipelineMonitor monitor_;
    mutable std::mutex stream_mu_;
    std::thread stream_thread_;
    std::atomic<bool> stream_running_{false};
    std::optional<nlohmann::json> last_run_;
    std::optional<std::string> last_run_error_;
};

}  // namespace vithsd::service
