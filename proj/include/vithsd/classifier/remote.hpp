#pragma once

#include <chrono>
#include <string>

#include "vithsd/classifier/predictor.hpp"

namespace vithsd::classifier {

struct RemoteEndpoint {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string path = "/predict";
    std::chrono::milliseconds timeout{2000};

    /// Accepts "http://host:port[/path]" or "host:port".
    static RemoteEndpoint parse(const std::string& url);
    std::string str() const;
};

/// One HTTP round-trip. latency_ms is the client-observed round-trip time.
/// Throws RemoteTimeout (unreachable, refused, or deadline exceeded) and
/// ProtocolError (non-200 status, malformed or invalid body).
PredictionOutput remote_predict(const RemoteEndpoint& endpoint, const Comment& comment);

class RemotePredictor final : public Predictor {
public:
    explicit RemotePredictor(RemoteEndpoint endpoint, std::string model_id = "remote");

    PredictionOutput predict(const Comment& comment) override;
    std::string model_id() const override { return model_id_; }

private:
    RemoteEndpoint endpoint_;
    std::string model_id_;
};

}  // namespace vithsd::classifier
