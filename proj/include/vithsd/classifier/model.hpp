#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vithsd/classifier/features.hpp"
#include "vithsd/core/types.hpp"

namespace vithsd::classifier {

inline constexpr std::size_t kHeads = kNumTargets;
inline constexpr std::size_t kHeadRows = kNumLevels;  // Normal, Clean, Offensive, Hate
inline constexpr std::size_t kRowsPerFeature = kHeads * kHeadRows;

using HeadScores = std::array<std::array<double, kHeadRows>, kHeads>;

/// Weights and biases of the five heads. Also used as the gradient container.
/// Weights are feature-major so one sparse feature touches 20 adjacent slots.
struct ModelParameters {
    std::size_t dim = 0;
    std::vector<double> weights;  // dim * 20
    std::vector<double> bias;     // 20

    ModelParameters() = default;
    explicit ModelParameters(std::size_t feature_dim)
        : dim(feature_dim), weights(feature_dim * kRowsPerFeature, 0.0), bias(kRowsPerFeature, 0.0) {}

    static constexpr std::size_t slot(std::size_t head, std::size_t row) noexcept { return head * kHeadRows + row; }
    std::size_t weight_index(std::size_t head, std::size_t row, std::size_t feature) const noexcept {
        return feature * kRowsPerFeature + slot(head, row);
    }
    double& weight(std::size_t head, std::size_t row, std::size_t feature) {
        return weights[weight_index(head, row, feature)];
    }
    double weight(std::size_t head, std::size_t row, std::size_t feature) const {
        return weights[weight_index(head, row, feature)];
    }
    double& head_bias(std::size_t head, std::size_t row) { return bias[slot(head, row)]; }
    double head_bias(std::size_t head, std::size_t row) const { return bias[slot(head, row)]; }

    std::size_t size() const noexcept { return weights.size() + bias.size(); }
    /// Flat view used by finite-difference checks: weights first, then biases.
    double& flat(std::size_t i) { return i < weights.size() ? weights[i] : bias[i - weights.size()]; }
    double flat(std::size_t i) const { return i < weights.size() ? weights[i] : bias[i - weights.size()]; }

    friend bool operator==(const ModelParameters&, const ModelParameters&) = default;
};

struct TrainingMetadata {
    std::uint64_t seed = 0;
    std::size_t epochs = 0;
    std::size_t batch_size = 0;
    double learning_rate = 0.0;
    double momentum = 0.0;
    double l2 = 0.0;
    /// Full-data objective before training, then after every epoch.
    std::vector<double> loss_curve;

    friend bool operator==(const TrainingMetadata&, const TrainingMetadata&) = default;
};

/// Shared hashed-feature representation feeding five softmax heads, one per
/// target, each over the four levels.
struct MultiHeadLinearModel {
    ModelParameters params;
    TrainingMetadata metadata;
    std::string model_id = "linear-hash";

    MultiHeadLinearModel() = default;
    explicit MultiHeadLinearModel(std::size_t dim) : params(dim) {}
    std::size_t dim() const noexcept { return params.dim; }

    friend bool operator==(const MultiHeadLinearModel&, const MultiHeadLinearModel&) = default;
};

/// Per-head raw scores W_t x + b_t. Throws DimensionError on mismatch.
HeadScores logits(const ModelParameters& params, const FeatureVector& x);

/// Max-shifted softmax of each row.
HeadScores softmax_heads(const HeadScores& scores);

/// Five probability simplexes, one per target.
HeadScores forward(const MultiHeadLinearModel& model, const FeatureVector& x);

/// Argmax per head; ties resolve to the lowest code (Normal first).
LabelVector decode(const HeadScores& probabilities);

struct PredictionOutput {
    std::string comment_id;
    HeadScores probabilities{};
    LabelVector labels;
    std::string model_id;
    double latency_ms = 0.0;

    TermList terms() const;
};

/// Preprocesses the comment text, extracts features, runs forward and decodes.
/// Latency covers the whole call.
PredictionOutput predict_labels(const MultiHeadLinearModel& model, const Comment& comment);

struct Example {
    FeatureVector features;
    LabelVector gold;
};

Example make_example(const LabeledComment& lc, std::size_t dim);
std::vector<Example> make_examples(std::span<const LabeledComment> data, std::size_t dim);

struct LossAndGradient {
    double loss = 0.0;
    ModelParameters gradient;
};

/// Mean over the batch of the summed per-head cross-entropy, plus
/// (l2 / 2) * ||W||^2 over weights (biases are not penalized).
double objective(const ModelParameters& params, std::span<const Example> batch, double l2);

/// Exact gradient of objective(). The batch must be non-empty.
LossAndGradient loss_and_grad(const ModelParameters& params, std::span<const Example> batch, double l2);
LossAndGradient loss_and_grad(const MultiHeadLinearModel& model, std::span<const LabeledComment> batch, double l2);

namespace detail {
/// Adds the data-term gradient of data[indices] (already divided by the batch
/// size) into `grad` and returns the mean data loss. No penalty term.
double accumulate_data_gradient(const ModelParameters& params, std::span<const Example> data,
                                std::span<const std::size_t> indices, ModelParameters& grad);
}  // namespace detail

}  // namespace vithsd::classifier
