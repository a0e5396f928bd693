#pragma once

#include "segkit/head.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace segkit {

struct FilterConfig {
    double pred_iou_threshold = 0.3;
    double box_iou_cutoff = 0.3;
    std::size_t min_region_area = 150;

    /// Settings of the untuned reference generator (0.58, 0.4, 0).
    static FilterConfig vanilla() { return {0.58, 0.4, 0}; }
    static FilterConfig filtered() { return {}; }

    void validate() const;
};

/// Keeps candidates with predicted_iou >= threshold, preserving order.
std::vector<MaskCandidate> threshold_by_pred_iou(std::vector<MaskCandidate> candidates,
                                                 double threshold);

std::vector<MaskCandidate> drop_empty(std::vector<MaskCandidate> candidates);

/// Greedy suppression over tight mask boxes. Candidates are visited by
/// predicted_iou (descending), then mask area (descending), then input index;
/// one is kept iff its box IoU with every kept box is below `cutoff`. Output
/// is in visiting order. Every mask must be non-empty.
std::vector<MaskCandidate> box_nms(std::vector<MaskCandidate> candidates, double cutoff);

/// Fills 8-connected background components smaller than min_area, then
/// removes 8-connected foreground components smaller than min_area.
BinaryMask clean_regions(BinaryMask const& mask, std::size_t min_area);

/// 8-connected component labels (0 = not selected) and per-label areas
/// (index 0 unused) for pixels whose value equals `value`.
struct Components {
    std::vector<int> labels;
    std::vector<std::size_t> areas;
};
Components connected_components(BinaryMask const& mask, std::uint8_t value);

/// threshold -> drop empty -> clean regions -> drop emptied -> box NMS.
std::vector<MaskCandidate> run_pipeline(std::vector<MaskCandidate> candidates,
                                        FilterConfig const& config);

struct MaskCountReport {
    std::string pipeline;
    std::vector<std::size_t> per_image;
    std::size_t total = 0;
    std::size_t image_count = 0;

    double mean_per_image() const {
        return image_count ? static_cast<double>(total) / static_cast<double>(image_count) : 0.0;
    }
};

MaskCountReport count_masks(std::string pipeline,
                            std::span<std::vector<MaskCandidate> const> per_image);
MaskCountReport count_masks(std::string pipeline, std::span<std::size_t const> per_image_counts);

/// Report with only totals, for comparisons against externally counted runs.
MaskCountReport mask_count_from_total(std::string pipeline, std::size_t total,
                                      std::size_t image_count);

std::string render_mask_counts(std::span<MaskCountReport const> reports);
std::string mask_counts_to_json(std::span<MaskCountReport const> reports);
std::vector<MaskCountReport> mask_counts_from_json(std::string const& text);

} // namespace segkit
