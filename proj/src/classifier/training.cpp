#include "vithsd/classifier/training.hpp"

#include <cmath>
#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "vithsd/core/errors.hpp"

namespace vithsd::classifier {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        raise(ErrorCode::InvalidConfig, "learning rate must be positive");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) raise(ErrorCode::InvalidConfig, "momentum must lie in [0, 1)");
    if (epochs < 1) raise(ErrorCode::InvalidConfig, "epochs must be >= 1");
    if (batch_size < 1) raise(ErrorCode::InvalidConfig, "batch size must be >= 1");
    if (!(l2 >= 0.0) || !std::isfinite(l2)) raise(ErrorCode::InvalidConfig, "l2 penalty must be >= 0");
    if (dim < 1) raise(ErrorCode::InvalidConfig, "feature dimension must be >= 1");
}

namespace {

// Fisher-Yates with an explicit generator so the permutation does not depend
// on the standard library's distribution implementation.
void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(idx[i - 1], idx[j]);
    }
}

void check_finite(double loss, std::size_t step) {
    if (!std::isfinite(loss)) {
        raise(ErrorCode::DivergenceError, "non-finite loss at step " + std::to_string(step));
    }
}

}  // namespace

MultiHeadLinearModel train(std::span<const Example> data, const TrainConfig& config, const EpochCallback& on_epoch) {
    config.validate();
    if (data.empty()) raise(ErrorCode::EmptyInput, "training set is empty");
    for (const auto& ex : data) {
        if (ex.features.dim != config.dim) {
            raise(ErrorCode::DimensionError, "example dimension " + std::to_string(ex.features.dim) +
                                                 " does not match config dimension " + std::to_string(config.dim));
        }
    }

    MultiHeadLinearModel model(config.dim);
    model.metadata = {config.seed, config.epochs, config.batch_size, config.learning_rate,
                      config.momentum, config.l2, {}};
    model.model_id = "linear-hash-d" + std::to_string(config.dim) + "-s" + std::to_string(config.seed);

    ModelParameters& theta = model.params;
    ModelParameters velocity(config.dim);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(config.seed);
    ModelParameters grad(config.dim);

    const double initial = objective(theta, data, config.l2);
    check_finite(initial, 0);
    model.metadata.loss_curve.push_back(initial);

    std::size_t step = 0;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        shuffle_indices(order, rng);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            const std::span<const std::size_t> batch(order.data() + start, end - start);

            ++step;
            const double loss = detail::accumulate_data_gradient(theta, data, batch, grad);
            check_finite(loss, step);
            // One fused pass: add the penalty gradient, step, and clear the buffer.
            for (std::size_t i = 0; i < theta.weights.size(); ++i) {
                const double g = grad.weights[i] + config.l2 * theta.weights[i];
                velocity.weights[i] = config.momentum * velocity.weights[i] + g;
                theta.weights[i] -= config.learning_rate * velocity.weights[i];
                grad.weights[i] = 0.0;
            }
            for (std::size_t i = 0; i < theta.bias.size(); ++i) {
                velocity.bias[i] = config.momentum * velocity.bias[i] + grad.bias[i];
                theta.bias[i] -= config.learning_rate * velocity.bias[i];
                grad.bias[i] = 0.0;
            }
        }
        const double epoch_loss = objective(theta, data, config.l2);
        check_finite(epoch_loss, step);
        model.metadata.loss_curve.push_back(epoch_loss);
        if (on_epoch) on_epoch(epoch, epoch_loss);
    }
    return model;
}

MultiHeadLinearModel train(std::span<const LabeledComment> data, const TrainConfig& config,
                           const EpochCallback& on_epoch) {
    config.validate();
    if (data.empty()) raise(ErrorCode::EmptyInput, "training set is empty");
    const auto examples = make_examples(data, config.dim);
    return train(std::span<const Example>(examples), config, on_epoch);
}

}  // namespace vithsd::classifier
