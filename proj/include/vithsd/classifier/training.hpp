#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

#include "vithsd/classifier/model.hpp"

namespace vithsd::classifier {

struct TrainConfig {
    double learning_rate = 0.05;
    double momentum = 0.9;
    std::size_t epochs = 10;
    std::size_t batch_size = 32;
    double l2 = 1e-5;
    std::uint64_t seed = 42;
    std::size_t dim = kDefaultFeatureDim;

    /// learning_rate > 0, epochs and batch_size >= 1, momentum in [0, 1),
    /// l2 >= 0, dim >= 1. Throws InvalidConfig.
    void validate() const;
};

/// Called after each epoch with (epoch index from 1, full-data objective).
using EpochCallback = std::function<void(std::size_t, double)>;

/// Mini-batch gradient descent with heavy-ball momentum over seeded shuffles:
///   v <- momentum * v + grad,  theta <- theta - learning_rate * v.
/// Deterministic bit-for-bit for identical data order and config.
/// Throws EmptyInput, DivergenceError (non-finite loss, naming the step).
MultiHeadLinearModel train(std::span<const Example> data, const TrainConfig& config,
                           const EpochCallback& on_epoch = {});
MultiHeadLinearModel train(std::span<const LabeledComment> data, const TrainConfig& config,
                           const EpochCallback& on_epoch = {});

}  // namespace vithsd::classifier
