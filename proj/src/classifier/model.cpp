#include "vithsd/classifier/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "vithsd/core/errors.hpp"
#include "vithsd/core/labels.hpp"
#include "vithsd/core/text.hpp"

namespace vithsd::classifier {

namespace {

void check_dim(const ModelParameters& params, const FeatureVector& x) {
    if (x.dim != params.dim) {
        raise(ErrorCode::DimensionError, "feature dimension " + std::to_string(x.dim) +
                                             " does not match model dimension " + std::to_string(params.dim));
    }
}

double log_sum_exp(const std::array<double, kHeadRows>& z) {
    const double m = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) s += std::exp(v - m);
    return m + std::log(s);
}

// Adds the data term of one example, scaled by `scale`, into `grad`; returns
// the example's cross-entropy summed over heads.
double accumulate_example(const ModelParameters& params, const Example& ex, double scale,
                          ModelParameters* grad) {
    const HeadScores z = logits(params, ex.features);
    double loss = 0.0;
    for (std::size_t t = 0; t < kHeads; ++t) {
        const auto gold = static_cast<std::size_t>(code_of(ex.gold.at(t)));
        const double lse = log_sum_exp(z[t]);
        loss += lse - z[t][gold];
        if (grad == nullptr) continue;
        for (std::size_t k = 0; k < kHeadRows; ++k) {
            const double p = std::exp(z[t][k] - lse);
            const double d = scale * (p - (k == gold ? 1.0 : 0.0));
            grad->head_bias(t, k) += d;
            for (const auto& [j, xj] : ex.features.entries) grad->weight(t, k, j) += d * xj;
        }
    }
    return loss;
}

double weight_penalty(const ModelParameters& params, double l2) {
    if (l2 == 0.0) return 0.0;
    double sq = 0.0;
    for (double w : params.weights) sq += w * w;
    return 0.5 * l2 * sq;
}

}  // namespace

HeadScores logits(const ModelParameters& params, const FeatureVector& x) {
    check_dim(params, x);
    HeadScores z{};
    for (std::size_t t = 0; t < kHeads; ++t) {
        for (std::size_t k = 0; k < kHeadRows; ++k) z[t][k] = params.head_bias(t, k);
    }
    for (const auto& [j, xj] : x.entries) {
        const double* w = &params.weights[static_cast<std::size_t>(j) * kRowsPerFeature];
        for (std::size_t t = 0; t < kHeads; ++t) {
            for (std::size_t k = 0; k < kHeadRows; ++k) z[t][k] += w[ModelParameters::slot(t, k)] * xj;
        }
    }
    return z;
}

HeadScores softmax_heads(const HeadScores& scores) {
    HeadScores p{};
    for (std::size_t t = 0; t < kHeads; ++t) {
        const double m = *std::max_element(scores[t].begin(), scores[t].end());
        double s = 0.0;
        for (std::size_t k = 0; k < kHeadRows; ++k) {
            p[t][k] = std::exp(scores[t][k] - m);
            s += p[t][k];
        }
        for (std::size_t k = 0; k < kHeadRows; ++k) p[t][k] /= s;
    }
    return p;
}

HeadScores forward(const MultiHeadLinearModel& model, const FeatureVector& x) {
    return softmax_heads(logits(model.params, x));
}

LabelVector decode(const HeadScores& probabilities) {
    LabelVector v;
    for (std::size_t t = 0; t < kHeads; ++t) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < kHeadRows; ++k) {
            if (probabilities[t][k] > probabilities[t][best]) best = k;
        }
        v.set(kAllTargets[t], static_cast<HatredLevel>(best));
    }
    return v;
}

TermList PredictionOutput::terms() const { return label_vector_to_terms(labels); }

PredictionOutput predict_labels(const MultiHeadLinearModel& model, const Comment& comment) {
    const auto start = std::chrono::steady_clock::now();
    PredictionOutput out;
    out.comment_id = comment.id;
    out.model_id = model.model_id;
    out.probabilities = forward(model, extract_features(preprocess_text(comment.text), model.dim()));
    out.labels = decode(out.probabilities);
    out.latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

Example make_example(const LabeledComment& lc, std::size_t dim) {
    return Example{extract_features(preprocess_text(lc.comment.text), dim), lc.labels};
}

std::vector<Example> make_examples(std::span<const LabeledComment> data, std::size_t dim) {
    std::vector<Example> out;
    out.reserve(data.size());
    for (const auto& lc : data) out.push_back(make_example(lc, dim));
    return out;
}

double objective(const ModelParameters& params, std::span<const Example> batch, double l2) {
    if (batch.empty()) raise(ErrorCode::EmptyInput, "objective needs a non-empty batch");
    double data = 0.0;
    for (const auto& ex : batch) data += accumulate_example(params, ex, 0.0, nullptr);
    return data / static_cast<double>(batch.size()) + weight_penalty(params, l2);
}

LossAndGradient loss_and_grad(const ModelParameters& params, std::span<const Example> batch, double l2) {
    if (batch.empty()) raise(ErrorCode::EmptyInput, "loss_and_grad needs a non-empty batch");
    LossAndGradient out{0.0, ModelParameters(params.dim)};
    const double scale = 1.0 / static_cast<double>(batch.size());
    double data = 0.0;
    for (const auto& ex : batch) data += accumulate_example(params, ex, scale, &out.gradient);
    out.loss = data / static_cast<double>(batch.size()) + weight_penalty(params, l2);
    if (l2 != 0.0) {
        for (std::size_t i = 0; i < params.weights.size(); ++i) out.gradient.weights[i] += l2 * params.weights[i];
    }
    return out;
}

LossAndGradient loss_and_grad(const MultiHeadLinearModel& model, std::span<const LabeledComment> batch, double l2) {
    const auto examples = make_examples(batch, model.dim());
    return loss_and_grad(model.params, examples, l2);
}

namespace detail {

double accumulate_data_gradient(const ModelParameters& params, std::span<const Example> data,
                                std::span<const std::size_t> indices, ModelParameters& grad) {
    if (indices.empty()) raise(ErrorCode::EmptyInput, "empty batch");
    const double scale = 1.0 / static_cast<double>(indices.size());
    double loss = 0.0;
    for (std::size_t i : indices) loss += accumulate_example(params, data[i], scale, &grad);
    return loss / static_cast<double>(indices.size());
}

}  // namespace detail

}  // namespace vithsd::classifier
