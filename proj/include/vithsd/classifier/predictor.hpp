#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "vithsd/classifier/model.hpp"

namespace vithsd::classifier {

/// A classifier the streaming workers and the HTTP service can call
/// concurrently. Implementations must be thread-safe.
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual PredictionOutput predict(const Comment& comment) = 0;
    virtual std::string model_id() const = 0;
};

class LocalPredictor final : public Predictor {
public:
    explicit LocalPredictor(std::shared_ptr<const MultiHeadLinearModel> model);

    PredictionOutput predict(const Comment& comment) override;
    std::string model_id() const override { return model_->model_id; }
    const MultiHeadLinearModel& model() const noexcept { return *model_; }

private:
    std::shared_ptr<const MultiHeadLinearModel> model_;
};

/// Remote inference wire format (HTTP POST /predict).
///   request:  {"id": string, "text": string}
///   response: {"id": string, "probabilities": {slug: [4 reals]},
///              "terms": ["slug#level", ...], "latency_ms": real}
nlohmann::json prediction_request_json(const Comment& comment);
nlohmann::json prediction_to_wire(const PredictionOutput& out);

/// Parses and validates a wire response. Throws ProtocolError on missing
/// fields, wrong id, unknown slugs, or probabilities that are not a simplex
/// (negative, non-finite, or summing away from 1 by more than 1e-6).
/// Labels come from "terms" when present, otherwise from argmax decoding.
PredictionOutput prediction_from_wire(const nlohmann::json& body, const std::string& expected_id);

}  // namespace vithsd::classifier
