#pragma once

#include "segkit/dataset.hpp"
#include "segkit/feature_map.hpp"
#include "segkit/losses.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace segkit {

inline constexpr std::size_t kCandidateCount = 3;

/// Point-conditioned mask decoder and classifier.
///
/// For a prompt at cell p and any cell u, the base logit is f_u^T W f_p. Candidate k
/// adds its own offset, so the three masks are nested thresholds of one score
/// field. Each candidate's predicted IoU is sigmoid(a_k * mean_positive_logit +
/// c_k * foreground_fraction + d_k). Class logits are a linear map of the
/// features averaged over a mask.
struct ToyHead {
    int channels = 0;
    std::size_t class_count = 0;
    std::vector<double> bilinear;                          ///< channels x channels, row-major
    std::array<double, kCandidateCount> offsets{};         ///< per-candidate bias
    std::array<double, 3 * kCandidateCount> iou_weights{}; ///< (a_k, c_k, d_k) per candidate
    std::vector<double> class_weights;                     ///< class_count x channels
    std::vector<double> class_bias;                        ///< class_count

    static ToyHead zeros(int channels, std::size_t class_count);
    static ToyHead random(int channels, std::size_t class_count, std::uint64_t seed,
                          double scale = 0.1);

    std::size_t parameter_count() const;
    std::vector<double> flatten() const;
    void assign(std::span<double const> flat);
    void validate() const;

    friend bool operator==(ToyHead const&, ToyHead const&) = default;
};

/// Offsets of each parameter group inside ToyHead::flatten().
struct ParameterLayout {
    std::size_t bilinear = 0;
    std::size_t offsets = 0;
    std::size_t iou = 0;
    std::size_t class_weights = 0;
    std::size_t class_bias = 0;
    std::size_t end = 0;
};
ParameterLayout parameter_layout(ToyHead const& head);

struct MaskCandidate {
    BinaryMask mask;           ///< logits > 0
    std::vector<float> logits; ///< canvas resolution; may be released after filtering
    double predicted_iou = 0.0;
    Point prompt_point;
    std::vector<double> label_logits;
    std::size_t candidate_index = 0;
};

/// Three candidates for one point prompt. The label logits are shared and
/// pooled over the most confident candidate. Throws ArgumentError when the
/// point lies outside the canvas.
std::vector<MaskCandidate> predict_candidates(ToyHead const& head, FeatureMap const& features,
                                              Canvas canvas, Point point);

double mask_iou(BinaryMask const& a, BinaryMask const& b);

/// Index of the candidate with the highest IoU against gt; ties go low.
std::size_t select_best_candidate(std::span<MaskCandidate const> candidates,
                                  BinaryMask const& gt);

/// Features averaged over the mask's pixels; zeros for an empty mask.
std::vector<double> pooled_features(FeatureMap const& features, BinaryMask const& mask);

std::vector<double> class_logits(ToyHead const& head, std::span<double const> pooled);

/// Argmax class for features pooled over the mask; ties go to the lowest index.
std::size_t classify(ToyHead const& head, FeatureMap const& features, BinaryMask const& mask);
std::size_t classify(ToyHead const& head, FeatureMap const& features,
                     MaskCandidate const& candidate);

std::size_t argmax_lowest(std::span<double const> values);

struct HeadLoss {
    LossReport report;
    double iou_mse = 0.0;       ///< auxiliary fit of the predicted-IoU head
    std::size_t selected = 0;   ///< candidate that received the mask losses
    std::array<double, kCandidateCount> candidate_ious{};
};

/// Loss of one (image, mask, prompt) training pair. The candidate with the
/// best IoU against gt takes focal + dice; the classifier, pooled over that
/// candidate, takes cross-entropy; the IoU head is fit to all three IoUs by
/// squared error. `gradient` receives d(report.total)/d(params) in flatten()
/// order; `iou_gradient` receives d(iou_mse)/d(params) with the mask statistics
/// held fixed, so it is non-zero only on the IoU head. `forced_candidate` pins
/// the selection (used by gradient checks).
HeadLoss head_loss(ToyHead const& head, FeatureMap const& features, Canvas canvas, Point prompt,
                   InstanceMask const& gt, LossWeights const& weights,
                   std::vector<double>* gradient = nullptr,
                   std::vector<double>* iou_gradient = nullptr,
                   std::optional<std::size_t> forced_candidate = std::nullopt);

} // namespace segkit
