#include "segkit/everything.hpp"

#include "segkit/assign.hpp"
#include "segkit/error.hpp"
#include "segkit/parallel.hpp"

#include <fmt/format.h>

#include <map>

namespace segkit {

namespace {

ImageResult run_image(ToyHead const& head, ImageRecord const& image, FeatureMap const& fmap,
                      EverythingConfig const& config) {
    auto const canvas = image.frame.canvas();
    auto const grid = build_grid(config.grid_per_side, canvas.width, canvas.height);

    std::vector<Assignment> prompts;
    std::map<std::size_t, std::vector<MaskCandidate>> at_prompt;
    for (auto const& m : image.masks) {
        prompts.push_back(assign_mask(fmap, m, grid));
        at_prompt[prompts.back().grid_index];
    }

    ImageResult result;
    result.image_id = image.id();
    std::vector<MaskCandidate> non_empty;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto candidates = predict_candidates(head, fmap, canvas, grid.at(i));
        result.raw_candidates += candidates.size();
        auto it = at_prompt.find(i);
        for (auto& c : candidates) {
            c.logits.clear();
            c.logits.shrink_to_fit();
            if (it != at_prompt.end()) {
                it->second.push_back(c);
            }
            if (!c.mask.empty()) {
                non_empty.push_back(std::move(c));
            }
        }
    }

    for (std::size_t p = 0; p < config.pipelines.size(); ++p) {
        auto const& filter = config.pipelines[p].filter;
        if (p + 1 == config.pipelines.size()) {
            result.survivors.push_back(run_pipeline(std::move(non_empty), filter));
        } else {
            result.survivors.push_back(run_pipeline(non_empty, filter));
        }
    }

    for (std::size_t k = 0; k < image.masks.size(); ++k) {
        auto const& preds = at_prompt.at(prompts[k].grid_index);
        result.evals.push_back(
            instance_iou_acc(image.masks[k], preds, prompts[k].grid_point, config.accuracy));
    }
    return result;
}

} // namespace

EverythingResult run_everything_mode(ToyHead const& head, Manifest const& manifest,
                                     FeatureProvider const& features,
                                     EverythingConfig const& config) {
    head.validate();
    if (config.pipelines.empty()) {
        throw ArgumentError("at least one filter pipeline is required");
    }
    for (auto const& p : config.pipelines) {
        p.filter.validate();
    }
    EverythingResult out;
    out.images.resize(manifest.images.size());
    parallel_for(manifest.images.size(), config.threads, [&](std::size_t i) {
        auto const& img = manifest.images[i];
        out.images[i] = run_image(head, img, features.features_for(img), config);
    });

    std::vector<InstanceEval> evals;
    std::vector<std::size_t> raw;
    for (auto const& r : out.images) {
        evals.insert(evals.end(), r.evals.begin(), r.evals.end());
        raw.push_back(r.raw_candidates);
    }
    out.report = per_class_aggregate(evals, manifest.class_table);
    out.counts.push_back(count_masks("raw", raw));
    for (std::size_t p = 0; p < config.pipelines.size(); ++p) {
        std::vector<std::size_t> n;
        for (auto const& r : out.images) n.push_back(r.survivors[p].size());
        out.counts.push_back(count_masks(config.pipelines[p].name, n));
    }
    return out;
}

} // namespace segkit
