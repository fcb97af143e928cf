#include "vithsd/classifier/predictor.hpp"

#include <cmath>

#include "vithsd/core/errors.hpp"
#include "vithsd/core/labels.hpp"

namespace vithsd::classifier {

LocalPredictor::LocalPredictor(std::shared_ptr<const MultiHeadLinearModel> model) : model_(std::move(model)) {
    if (!model_) raise(ErrorCode::InvalidConfig, "local predictor needs a model");
}

PredictionOutput LocalPredictor::predict(const Comment& comment) { return predict_labels(*model_, comment); }

nlohmann::json prediction_request_json(const Comment& comment) {
    return {{"id", comment.id}, {"text", comment.text}};
}

nlohmann::json prediction_to_wire(const PredictionOutput& out) {
    nlohmann::json probs = nlohmann::json::object();
    for (Target t : kAllTargets) {
        const auto& p = out.probabilities[index_of(t)];
        probs[std::string(slug(t))] = {p[0], p[1], p[2], p[3]};
    }
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& term : out.terms()) terms.push_back(term.str());
    return {{"id", out.comment_id},
            {"probabilities", probs},
            {"terms", terms},
            {"latency_ms", out.latency_ms},
            {"model", out.model_id}};
}

PredictionOutput prediction_from_wire(const nlohmann::json& body, const std::string& expected_id) {
    auto fail = [](const std::string& msg) { raise(ErrorCode::ProtocolError, msg); };
    if (!body.is_object()) fail("response is not a JSON object");
    if (!body.contains("id") || !body["id"].is_string()) fail("response lacks string 'id'");
    if (body["id"].get<std::string>() != expected_id) {
        fail("response id '" + body["id"].get<std::string>() + "' does not match request '" + expected_id + "'");
    }
    if (!body.contains("probabilities") || !body["probabilities"].is_object()) fail("response lacks 'probabilities'");

    PredictionOutput out;
    out.comment_id = expected_id;
    const auto& probs = body["probabilities"];
    std::array<bool, kNumTargets> seen{};
    for (const auto& [key, value] : probs.items()) {
        const auto t = resolve_target(key);
        if (!t) fail("unknown target '" + key + "' in probabilities");
        if (!value.is_array() || value.size() != kHeadRows) fail("probabilities for '" + key + "' need 4 reals");
        double sum = 0.0;
        for (std::size_t k = 0; k < kHeadRows; ++k) {
            if (!value[k].is_number()) fail("non-numeric probability for '" + key + "'");
            const double p = value[k].get<double>();
            if (!std::isfinite(p) || p < 0.0) fail("invalid probability for '" + key + "'");
            out.probabilities[index_of(*t)][k] = p;
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-6) fail("probabilities for '" + key + "' do not sum to 1");
        seen[index_of(*t)] = true;
    }
    for (Target t : kAllTargets) {
        if (!seen[index_of(t)]) fail("probabilities missing target '" + std::string(slug(t)) + "'");
    }

    if (body.contains("terms")) {
        if (!body["terms"].is_array()) fail("'terms' must be an array");
        std::string list = "[";
        for (const auto& term : body["terms"]) {
            if (!term.is_string()) fail("'terms' entries must be strings");
            if (list.size() > 1) list += ", ";
            list += term.get<std::string>();
        }
        list += "]";
        try {
            out.labels = terms_to_label_vector(parse_label_list(list));
        } catch (const Error& e) {
            fail(std::string("bad terms: ") + e.what());
        }
    } else {
        out.labels = decode(out.probabilities);
    }
    if (body.contains("latency_ms") && body["latency_ms"].is_number()) {
        out.latency_ms = body["latency_ms"].get<double>();
    }
    if (body.contains("model") && body["model"].is_string()) out.model_id = body["model"].get<std::string>();
    return out;
}

}  // namespace vithsd::classifier
