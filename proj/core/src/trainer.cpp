#include "segkit/trainer.hpp"

#include "segkit/error.hpp"
#include "segkit/random.hpp"

#include <fmt/format.h>

#include <map>
#include <numeric>

namespace segkit {

std::string TrainLog::to_csv() const {
    std::string out = "epoch,mean_ce,mean_focal,mean_dice,mean_total,learning_rate\n";
    for (auto const& e : epochs) {
        out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", e.epoch, e.mean_ce,
                           e.mean_focal, e.mean_dice, e.mean_total, e.learning_rate);
    }
    return out;
}

TrainResult train(ToyHead head, Manifest const& manifest, std::span<Assignment const> assignments,
                  FeatureProvider const& features, TrainConfig const& config) {
    std::vector<FeatureMap> maps;
    maps.reserve(manifest.images.size());
    for (auto const& img : manifest.images) {
        maps.push_back(features.features_for(img));
    }
    return train(std::move(head), manifest, assignments, maps, config);
}

TrainResult train(ToyHead head, Manifest const& manifest, std::span<Assignment const> assignments,
                  std::span<FeatureMap const> features, TrainConfig const& config) {
    if (config.learning_rate < 0.0) {
        throw ArgumentError("learning rate must be non-negative");
    }
    if (config.epochs < 1) {
        throw ArgumentError("training needs at least one epoch");
    }
    if (features.size() != manifest.images.size()) {
        throw ArgumentError("one feature map per image is required");
    }
    head.validate();
    if (head.class_count != manifest.class_table.size()) {
        throw ArgumentError(fmt::format("head has {} classes, manifest has {}", head.class_count,
                                        manifest.class_table.size()));
    }

    std::map<std::string, Point, std::less<>> prompt_of;
    for (auto const& a : assignments) {
        prompt_of[a.instance_id] = a.grid_point;
    }
    struct Pair {
        std::size_t image;
        std::size_t mask;
        Point prompt;
    };
    std::vector<Pair> pairs;
    std::map<std::string, bool, std::less<>> in_manifest;
    for (std::size_t i = 0; i < manifest.images.size(); ++i) {
        auto const& img = manifest.images[i];
        for (std::size_t j = 0; j < img.masks.size(); ++j) {
            auto const& id = img.masks[j].instance_id;
            in_manifest[id] = true;
            auto it = prompt_of.find(id);
            if (it == prompt_of.end()) {
                throw ArgumentError("no assignment for mask '" + id + "'");
            }
            pairs.push_back({i, j, it->second});
        }
    }
    for (auto const& a : assignments) {
        if (!in_manifest.contains(a.instance_id)) {
            throw ArgumentError("assignment references unknown instance '" + a.instance_id + "'");
        }
    }

    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<LossReport> losses(pairs.size());
    Rng rng(config.seed);
    AdamW optimizer(head.parameter_count(), config.optimizer);
    auto params = head.flatten();
    std::vector<double> grad, iou_grad;
    TrainLog log;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (config.shuffle) {
            for (std::size_t i = pairs.size(); i > 1; --i) {
                auto const j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(i - 1)));
                std::swap(order[i - 1], order[j]);
            }
        }
        double const lr = cosine_learning_rate(config.learning_rate, epoch, config.epochs);
        EpochLog e;
        e.epoch = epoch;
        e.learning_rate = lr;
        for (auto const idx : order) {
            auto const& pair = pairs[idx];
            auto const& img = manifest.images[pair.image];
            auto const loss = head_loss(head, features[pair.image], img.frame.canvas(), pair.prompt,
                                        img.masks[pair.mask], config.loss_weights, &grad, &iou_grad);
            losses[idx] = loss.report;
            for (std::size_t k = 0; k < grad.size(); ++k) {
                grad[k] += iou_grad[k];
            }
            optimizer.step(params, grad, lr);
            head.assign(params);
        }
        for (auto const& l : losses) {
            e.mean_ce += l.ce;
            e.mean_focal += l.focal;
            e.mean_dice += l.dice;
            e.mean_total += l.total;
        }
        if (!pairs.empty()) {
            double const n = static_cast<double>(pairs.size());
            e.mean_ce /= n;
            e.mean_focal /= n;
            e.mean_dice /= n;
            e.mean_total /= n;
        }
        log.epochs.push_back(e);
    }
    return {std::move(head), std::move(log)};
}

} // namespace segkit
