#include "segkit/head.hpp"

#include "segkit/error.hpp"
#include "segkit/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace segkit {

ToyHead ToyHead::zeros(int channels, std::size_t class_count) {
    if (channels < 1 || class_count < 1) {
        throw ArgumentError("head needs at least one channel and one class");
    }
    ToyHead h;
    h.channels = channels;
    h.class_count = class_count;
    auto const c = static_cast<std::size_t>(channels);
    h.bilinear.assign(c * c, 0.0);
    h.class_weights.assign(class_count * c, 0.0);
    h.class_bias.assign(class_count, 0.0);
    return h;
}

ToyHead ToyHead::random(int channels, std::size_t class_count, std::uint64_t seed, double scale) {
    ToyHead h = zeros(channels, class_count);
    Rng rng(seed);
    for (auto& w : h.bilinear) w = rng.uniform(-scale, scale);
    for (auto& w : h.offsets) w = rng.uniform(-scale, scale);
    for (auto& w : h.class_weights) w = rng.uniform(-scale, scale);
    return h;
}

ParameterLayout parameter_layout(ToyHead const& head) {
    ParameterLayout l;
    l.bilinear = 0;
    l.offsets = head.bilinear.size();
    l.iou = l.offsets + head.offsets.size();
    l.class_weights = l.iou + head.iou_weights.size();
    l.class_bias = l.class_weights + head.class_weights.size();
    l.end = l.class_bias + head.class_bias.size();
    return l;
}

std::size_t ToyHead::parameter_count() const { return parameter_layout(*this).end; }

std::vector<double> ToyHead::flatten() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    out.insert(out.end(), bilinear.begin(), bilinear.end());
    out.insert(out.end(), offsets.begin(), offsets.end());
    out.insert(out.end(), iou_weights.begin(), iou_weights.end());
    out.insert(out.end(), class_weights.begin(), class_weights.end());
    out.insert(out.end(), class_bias.begin(), class_bias.end());
    return out;
}

void ToyHead::assign(std::span<double const> flat) {
    auto const l = parameter_layout(*this);
    if (flat.size() != l.end) {
        throw ArgumentError(fmt::format("head has {} parameters, got {}", l.end, flat.size()));
    }
    std::copy_n(flat.begin() + l.bilinear, bilinear.size(), bilinear.begin());
    std::copy_n(flat.begin() + l.offsets, offsets.size(), offsets.begin());
    std::copy_n(flat.begin() + l.iou, iou_weights.size(), iou_weights.begin());
    std::copy_n(flat.begin() + l.class_weights, class_weights.size(), class_weights.begin());
    std::copy_n(flat.begin() + l.class_bias, class_bias.size(), class_bias.begin());
}

void ToyHead::validate() const {
    auto const c = static_cast<std::size_t>(channels);
    if (channels < 1 || class_count < 1 || bilinear.size() != c * c ||
        class_weights.size() != class_count * c || class_bias.size() != class_count) {
        throw ValidationError("head parameter shapes are inconsistent");
    }
    auto const flat = flatten();
    if (!std::all_of(flat.begin(), flat.end(), [](double v) { return std::isfinite(v); })) {
        throw ValidationError("head has non-finite parameters");
    }
}

namespace {

double sigmoid(double z) {
    if (z >= 0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    double const e = std::exp(z);
    return e / (1.0 + e);
}

/// Cell index of every canvas pixel.
std::vector<std::size_t> pixel_cells(FeatureMap const& f, Canvas canvas) {
    std::vector<std::size_t> cols(static_cast<std::size_t>(canvas.width));
    for (int x = 0; x < canvas.width; ++x) {
        cols[static_cast<std::size_t>(x)] = static_cast<std::size_t>(f.col_of(x, canvas.width));
    }
    std::vector<std::size_t> out(static_cast<std::size_t>(canvas.width) * canvas.height);
    for (int y = 0; y < canvas.height; ++y) {
        auto const row = static_cast<std::size_t>(f.row_of(y, canvas.height)) * f.fw();
        for (int x = 0; x < canvas.width; ++x) {
            out[static_cast<std::size_t>(y) * canvas.width + x] = row + cols[static_cast<std::size_t>(x)];
        }
    }
    return out;
}

struct Forward {
    std::vector<double> prompt_feature;
    std::vector<std::size_t> cells;  ///< pixel -> cell
    std::vector<double> cell_scores; ///< f_u^T W f_p per cell
};

Forward forward(ToyHead const& head, FeatureMap const& f, Canvas canvas, Point point) {
    if (f.channels() != head.channels) {
        throw ArgumentError(fmt::format("head expects {} channels, feature map has {}",
                                        head.channels, f.channels()));
    }
    if (canvas.width <= 0 || canvas.height <= 0 || !canvas.contains(point)) {
        throw ArgumentError(fmt::format("prompt ({}, {}) is outside the {}x{} canvas", point.x,
                                        point.y, canvas.width, canvas.height));
    }
    Forward fw;
    fw.prompt_feature = f.cell(f.row_of(point.y, canvas.height), f.col_of(point.x, canvas.width));
    auto const c = static_cast<std::size_t>(head.channels);
    std::vector<double> projected(c, 0.0);
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            projected[i] += head.bilinear[i * c + j] * fw.prompt_feature[j];
        }
    }
    std::size_t const plane = static_cast<std::size_t>(f.fh()) * f.fw();
    fw.cell_scores.assign(plane, 0.0);
    auto const values = f.values();
    for (std::size_t ch = 0; ch < c; ++ch) {
        double const w = projected[ch];
        float const* src = values.data() + ch * plane;
        for (std::size_t u = 0; u < plane; ++u) {
            fw.cell_scores[u] += w * src[u];
        }
    }
    fw.cells = pixel_cells(f, canvas);
    return fw;
}

struct CandidateStats {
    double mean_positive = 0.0;
    double fraction = 0.0;
};

CandidateStats stats_of(std::span<double const> logits) {
    double sum = 0.0;
    std::size_t n = 0;
    for (double z : logits) {
        if (z > 0) {
            sum += z;
            ++n;
        }
    }
    CandidateStats s;
    s.mean_positive = n ? sum / static_cast<double>(n) : 0.0;
    s.fraction = logits.empty() ? 0.0 : static_cast<double>(n) / static_cast<double>(logits.size());
    return s;
}

double predicted_iou_of(ToyHead const& head, std::size_t k, CandidateStats const& s) {
    return sigmoid(head.iou_weights[3 * k] * s.mean_positive + head.iou_weights[3 * k + 1] * s.fraction +
                   head.iou_weights[3 * k + 2]);
}

std::vector<double> pooled_by_cells(FeatureMap const& f, std::span<std::size_t const> cells,
                                    std::span<std::uint8_t const> mask) {
    std::size_t const plane = static_cast<std::size_t>(f.fh()) * f.fw();
    std::vector<double> counts(plane, 0.0);
    double total = 0.0;
    for (std::size_t p = 0; p < mask.size(); ++p) {
        if (mask[p]) {
            counts[cells[p]] += 1.0;
            total += 1.0;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(f.channels()), 0.0);
    if (total == 0.0) {
        return out;
    }
    auto const values = f.values();
    for (std::size_t ch = 0; ch < out.size(); ++ch) {
        double acc = 0.0;
        float const* src = values.data() + ch * plane;
        for (std::size_t u = 0; u < plane; ++u) {
            if (counts[u] != 0.0) acc += counts[u] * src[u];
        }
        out[ch] = acc / total;
    }
    return out;
}

} // namespace

std::vector<double> class_logits(ToyHead const& head, std::span<double const> pooled) {
    auto const c = static_cast<std::size_t>(head.channels);
    std::vector<double> out(head.class_bias);
    for (std::size_t k = 0; k < head.class_count; ++k) {
        for (std::size_t ch = 0; ch < c; ++ch) {
            out[k] += head.class_weights[k * c + ch] * pooled[ch];
        }
    }
    return out;
}

std::size_t argmax_lowest(std::span<double const> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

std::vector<MaskCandidate> predict_candidates(ToyHead const& head, FeatureMap const& features,
                                              Canvas canvas, Point point) {
    auto const fw = forward(head, features, canvas, point);
    std::size_t const n = fw.cells.size();
    std::vector<MaskCandidate> out(kCandidateCount);
    std::vector<double> logits(n);
    for (std::size_t k = 0; k < kCandidateCount; ++k) {
        auto& cand = out[k];
        cand.candidate_index = k;
        cand.prompt_point = point;
        cand.mask = BinaryMask(canvas.width, canvas.height);
        cand.logits.resize(n);
        auto mask = cand.mask.values();
        for (std::size_t p = 0; p < n; ++p) {
            double const z = fw.cell_scores[fw.cells[p]] + head.offsets[k];
            logits[p] = z;
            cand.logits[p] = static_cast<float>(z);
            mask[p] = z > 0.0 ? 1 : 0;
        }
        cand.predicted_iou = predicted_iou_of(head, k, stats_of(logits));
    }
    std::size_t confident = 0;
    for (std::size_t k = 1; k < kCandidateCount; ++k) {
        if (out[k].predicted_iou > out[confident].predicted_iou) confident = k;
    }
    auto const pooled = pooled_by_cells(features, fw.cells, out[confident].mask.values());
    auto const labels = class_logits(head, pooled);
    for (auto& cand : out) {
        cand.label_logits = labels;
    }
    return out;
}

double mask_iou(BinaryMask const& a, BinaryMask const& b) {
    auto const inter = intersection_area(a, b);
    auto const uni = a.area() + b.area() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::size_t select_best_candidate(std::span<MaskCandidate const> candidates, BinaryMask const& gt) {
    if (candidates.empty()) {
        throw ArgumentError("cannot select from an empty candidate list");
    }
    std::size_t best = 0;
    double best_iou = mask_iou(candidates[0].mask, gt);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        double const iou = mask_iou(candidates[i].mask, gt);
        if (iou > best_iou) {
            best_iou = iou;
            best = i;
        }
    }
    return best;
}

std::vector<double> pooled_features(FeatureMap const& features, BinaryMask const& mask) {
    auto const cells = pixel_cells(features, mask.canvas());
    return pooled_by_cells(features, cells, mask.values());
}

std::size_t classify(ToyHead const& head, FeatureMap const& features, BinaryMask const& mask) {
    auto const logits = class_logits(head, pooled_features(features, mask));
    return argmax_lowest(logits);
}

std::size_t classify(ToyHead const& head, FeatureMap const& features,
                     MaskCandidate const& candidate) {
    return classify(head, features, candidate.mask);
}

HeadLoss head_loss(ToyHead const& head, FeatureMap const& features, Canvas canvas, Point prompt,
                   InstanceMask const& gt, LossWeights const& weights,
                   std::vector<double>* gradient, std::vector<double>* iou_gradient,
                   std::optional<std::size_t> forced_candidate) {
    if (gt.mask.canvas() != canvas) {
        throw ArgumentError("ground-truth mask '" + gt.instance_id + "' is not on the prompt canvas");
    }
    if (gt.label >= head.class_count) {
        throw ArgumentError("ground-truth label is outside the head's classes");
    }
    auto const fw = forward(head, features, canvas, prompt);
    std::size_t const n = fw.cells.size();
    auto const g = gt.mask.values();
    auto const gt_area = static_cast<double>(gt.mask.area());

    HeadLoss result;
    std::array<CandidateStats, kCandidateCount> stats;
    std::vector<double> logits(n);
    for (std::size_t k = 0; k < kCandidateCount; ++k) {
        std::size_t inter = 0, area = 0;
        for (std::size_t p = 0; p < n; ++p) {
            double const z = fw.cell_scores[fw.cells[p]] + head.offsets[k];
            logits[p] = z;
            bool const on = z > 0.0;
            area += on;
            inter += on && g[p];
        }
        stats[k] = stats_of(logits);
        double const uni = static_cast<double>(area) + gt_area - static_cast<double>(inter);
        result.candidate_ious[k] = uni == 0.0 ? 0.0 : static_cast<double>(inter) / uni;
    }
    std::size_t selected = 0;
    for (std::size_t k = 1; k < kCandidateCount; ++k) {
        if (result.candidate_ious[k] > result.candidate_ious[selected]) selected = k;
    }
    if (forced_candidate) {
        if (*forced_candidate >= kCandidateCount) {
            throw ArgumentError("forced candidate index out of range");
        }
        selected = *forced_candidate;
    }
    result.selected = selected;

    // mask losses on the selected candidate
    std::vector<double> probs(n);
    std::vector<std::uint8_t> selected_mask(n);
    for (std::size_t p = 0; p < n; ++p) {
        double const z = fw.cell_scores[fw.cells[p]] + head.offsets[selected];
        probs[p] = sigmoid(z);
        selected_mask[p] = z > 0.0 ? 1 : 0;
    }
    auto const focal = focal_loss(probs, g);
    auto const dice = dice_loss(probs, g);

    // classifier on features pooled over the selected candidate
    auto const pooled = pooled_by_cells(features, fw.cells, selected_mask);
    auto const labels = class_logits(head, pooled);
    auto const ce = cross_entropy(labels, gt.label);

    result.report = make_loss_report(ce.value, focal.value, dice.value, weights);

    // predicted-IoU head fit
    std::array<double, kCandidateCount> pred{};
    for (std::size_t k = 0; k < kCandidateCount; ++k) {
        pred[k] = predicted_iou_of(head, k, stats[k]);
        double const d = pred[k] - result.candidate_ious[k];
        result.iou_mse += d * d / static_cast<double>(kCandidateCount);
    }

    auto const layout = parameter_layout(head);
    if (iou_gradient) {
        // mask statistics are held fixed: this term only trains the IoU head
        iou_gradient->assign(layout.end, 0.0);
        for (std::size_t k = 0; k < kCandidateCount; ++k) {
            double const d = 2.0 * (pred[k] - result.candidate_ious[k]) / static_cast<double>(kCandidateCount);
            double const dz = d * pred[k] * (1.0 - pred[k]);
            (*iou_gradient)[layout.iou + 3 * k] += dz * stats[k].mean_positive;
            (*iou_gradient)[layout.iou + 3 * k + 1] += dz * stats[k].fraction;
            (*iou_gradient)[layout.iou + 3 * k + 2] += dz;
        }
    }
    if (!gradient) {
        return result;
    }
    gradient->assign(layout.end, 0.0);
    auto& grad = *gradient;
    auto const c = static_cast<std::size_t>(head.channels);

    // dL/dz per pixel, accumulated per cell
    std::size_t const plane = fw.cell_scores.size();
    std::vector<double> cell_grad(plane, 0.0);
    double offset_grad = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        double const dp = weights.focal * focal.gradient[p] + weights.dice * dice.gradient[p];
        double const dz = dp * probs[p] * (1.0 - probs[p]);
        cell_grad[fw.cells[p]] += dz;
        offset_grad += dz;
    }
    grad[layout.offsets + selected] += offset_grad;

    // dL/dW[i][j] = (sum_u G_u f_u[i]) * f_p[j]
    auto const values = features.values();
    for (std::size_t i = 0; i < c; ++i) {
        double acc = 0.0;
        float const* src = values.data() + i * plane;
        for (std::size_t u = 0; u < plane; ++u) {
            if (cell_grad[u] != 0.0) acc += cell_grad[u] * src[u];
        }
        for (std::size_t j = 0; j < c; ++j) {
            grad[layout.bilinear + i * c + j] += acc * fw.prompt_feature[j];
        }
    }

    for (std::size_t k = 0; k < head.class_count; ++k) {
        double const dz = weights.ce * ce.gradient[k];
        grad[layout.class_bias + k] += dz;
        for (std::size_t ch = 0; ch < c; ++ch) {
            grad[layout.class_weights + k * c + ch] += dz * pooled[ch];
        }
    }

    return result;
}

} // namespace segkit
