#pragma once

#include "segkit/class_table.hpp"
#include "segkit/grid.hpp"
#include "segkit/head.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace segkit {

/// How the per-instance "Acc" figure is computed.
enum class AccuracyDefinition {
    foreground_recall, ///< |P and G| / |G|
    pixel_accuracy,    ///< correctly labelled pixels / all pixels
};

struct InstanceEval {
    std::string instance_id;
    std::size_t class_index = 0;
    double iou = 0.0;
    double acc = 0.0;
    std::optional<std::size_t> predicted_label;
    bool matched = false;
};

struct IouAcc {
    double iou = 0.0;
    double acc = 0.0;
};

IouAcc pixel_iou_acc(BinaryMask const& prediction, BinaryMask const& gt,
                     AccuracyDefinition definition = AccuracyDefinition::foreground_recall);

/// Scores gt against the most confident prediction prompted at `prompt`
/// (highest predicted_iou, ties to the earliest). No prediction at the point
/// gives an unmatched zero score.
InstanceEval instance_iou_acc(InstanceMask const& gt, std::span<MaskCandidate const> predictions,
                              Point prompt,
                              AccuracyDefinition definition = AccuracyDefinition::foreground_recall);

/// As above, deriving the prompt from the confidence-map prior snapped to the grid.
InstanceEval instance_iou_acc(InstanceMask const& gt, std::span<MaskCandidate const> predictions,
                              PointGrid const& grid, FeatureMap const& features,
                              AccuracyDefinition definition = AccuracyDefinition::foreground_recall);

struct ClassScore {
    std::string name;
    std::size_t count = 0;
    double iou = 0.0;
    double acc = 0.0;
    double cls_acc = 0.0;
};

struct EvalReport {
    std::vector<ClassScore> per_class; ///< class-table order, represented classes only
    double miou = 0.0;
    double macc = 0.0;
    double mean_cls_acc = 0.0;

    ClassScore const* find(std::string const& name) const;
};

/// Unweighted per-class means, then unweighted means over represented classes.
EvalReport per_class_aggregate(std::span<InstanceEval const> evals, ClassTable const& classes);

struct ClassificationAccuracy {
    std::vector<std::pair<std::string, double>> per_class;
    double mean = 0.0;
};

/// Fraction of each class's instances whose predicted label is correct;
/// unmatched instances count as wrong.
ClassificationAccuracy classification_accuracy(std::span<InstanceEval const> evals,
                                               ClassTable const& classes);

struct RenderedReport {
    std::string text;
    std::string json;
};

/// Fixed-width table (IoU and Acc in percent, classification accuracy as a
/// fraction) plus a JSON mirror. With a baseline, adds its columns and deltas.
RenderedReport render_report(EvalReport const& report, EvalReport const* baseline = nullptr);

std::string report_to_json(EvalReport const& report);
EvalReport report_from_json(std::string const& text);

} // namespace segkit
