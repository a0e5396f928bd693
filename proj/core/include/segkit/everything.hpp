#pragma once

#include "segkit/head.hpp"
#include "segkit/metrics.hpp"
#include "segkit/postprocess.hpp"

#include <string>
#include <utility>
#include <vector>

namespace segkit {

struct NamedPipeline {
    std::string name;
    FilterConfig filter;
};

struct EverythingConfig {
    int grid_per_side = 32;
    /// Evaluation and the primary survivor set use the first pipeline.
    std::vector<NamedPipeline> pipelines{{"filtered", FilterConfig::filtered()}};
    AccuracyDefinition accuracy = AccuracyDefinition::foreground_recall;
    unsigned threads = 1;
};

struct ImageResult {
    std::string image_id;
    std::size_t raw_candidates = 0; ///< 3 per grid point, before any filtering
    std::vector<std::vector<MaskCandidate>> survivors; ///< one list per pipeline
    std::vector<InstanceEval> evals;
};

struct EverythingResult {
    std::vector<ImageResult> images;
    EvalReport report;
    std::vector<MaskCountReport> counts; ///< "raw" first, then one per pipeline
};

/// Everything-mode inference: prompts the head at every grid point, filters
/// the candidates through each pipeline, and scores each ground-truth mask
/// against the most confident candidate at its assigned grid point.
/// Survivors keep masks but not logits. Results follow manifest order.
EverythingResult run_everything_mode(ToyHead const& head, Manifest const& manifest,
                                     FeatureProvider const& features,
                                     EverythingConfig const& config);

} // namespace segkit
