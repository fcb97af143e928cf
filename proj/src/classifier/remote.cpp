#include "vithsd/classifier/remote.hpp"

#include <httplib.h>

#include "vithsd/core/errors.hpp"

namespace vithsd::classifier {

RemoteEndpoint RemoteEndpoint::parse(const std::string& url) {
    RemoteEndpoint ep;
    std::string rest = url;
    if (rest.rfind("http://", 0) == 0) rest = rest.substr(7);
    else if (rest.rfind("https://", 0) == 0) raise(ErrorCode::InvalidConfig, "https endpoints are not supported");
    const auto slash = rest.find('/');
    if (slash != std::string::npos) {
        ep.path = rest.substr(slash);
        rest = rest.substr(0, slash);
    }
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) {
        ep.host = rest;
        ep.port = 80;
    } else {
        ep.host = rest.substr(0, colon);
        try {
            ep.port = std::stoi(rest.substr(colon + 1));
        } catch (const std::exception&) {
            raise(ErrorCode::InvalidConfig, "bad port in endpoint '" + url + "'");
        }
    }
    if (ep.host.empty() || ep.port <= 0 || ep.port > 65535) {
        raise(ErrorCode::InvalidConfig, "bad endpoint '" + url + "'");
    }
    return ep;
}

std::string RemoteEndpoint::str() const { return "http://" + host + ":" + std::to_string(port) + path; }

PredictionOutput remote_predict(const RemoteEndpoint& endpoint, const Comment& comment) {
    const auto start = std::chrono::steady_clock::now();
    httplib::Client client(endpoint.host, endpoint.port);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    const auto res = client.Post(endpoint.path, prediction_request_json(comment).dump(), "application/json");
    if (!res) {
        raise(ErrorCode::RemoteTimeout,
              "no response from " + endpoint.str() + " (" + httplib::to_string(res.error()) + ")");
    }
    if (res->status != 200) {
        raise(ErrorCode::ProtocolError, endpoint.str() + " answered HTTP " + std::to_string(res->status));
    }
    nlohmann::json body;
    try {
        body = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::ProtocolError, std::string("malformed response body: ") + e.what());
    }
    PredictionOutput out = prediction_from_wire(body, comment.id);
    out.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

RemotePredictor::RemotePredictor(RemoteEndpoint endpoint, std::string model_id)
    : endpoint_(std::move(endpoint)), model_id_(std::move(model_id)) {}

PredictionOutput RemotePredictor::predict(const Comment& comment) {
    PredictionOutput out = remote_predict(endpoint_, comment);
    if (out.model_id.empty()) out.model_id = model_id_;
    return out;
}

}  // namespace vithsd::classifier
