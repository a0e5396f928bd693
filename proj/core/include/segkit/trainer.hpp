#pragma once

#include "segkit/grid.hpp"
#include "segkit/head.hpp"
#include "segkit/optimizer.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace segkit {

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t epochs = 200;
    AdamWConfig optimizer;
    std::uint64_t seed = 0;
    LossWeights loss_weights;
    bool shuffle = true;
};

struct EpochLog {
    std::size_t epoch = 0;
    double mean_ce = 0.0;
    double mean_focal = 0.0;
    double mean_dice = 0.0;
    double mean_total = 0.0;
    double learning_rate = 0.0;
};

struct TrainLog {
    std::vector<EpochLog> epochs;

    /// epoch,mean_ce,mean_focal,mean_dice,mean_total,learning_rate
    std::string to_csv() const;
};

struct TrainResult {
    ToyHead head;
    TrainLog log;
};

/// Fine-tunes the head on every (image, mask) pair, prompting each mask at its
/// assigned grid point. One optimizer step per pair; the learning rate follows
/// a per-epoch cosine decay. Single-threaded and deterministic for a seed.
TrainResult train(ToyHead head, Manifest const& manifest, std::span<Assignment const> assignments,
                  FeatureProvider const& features, TrainConfig const& config);

/// Same as above with precomputed feature maps, one per manifest image.
TrainResult train(ToyHead head, Manifest const& manifest, std::span<Assignment const> assignments,
                  std::span<FeatureMap const> features, TrainConfig const& config);

} // namespace segkit
