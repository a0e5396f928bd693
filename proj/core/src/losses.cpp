#include "segkit/losses.hpp"

#include "segkit/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace segkit {

namespace {

void check_shapes(std::span<double const> probs, std::span<std::uint8_t const> gt) {
    if (probs.size() != gt.size()) {
        throw ArgumentError(
            fmt::format("prediction has {} elements, ground truth has {}", probs.size(), gt.size()));
    }
}

} // namespace

LossValue dice_loss(std::span<double const> probs, std::span<std::uint8_t const> gt) {
    check_shapes(probs, gt);
    double inter = 0.0, sum_p = 0.0, sum_g = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        double const g = gt[i] ? 1.0 : 0.0;
        inter += probs[i] * g;
        sum_p += probs[i];
        sum_g += g;
    }
    double const num = 2.0 * inter + kDiceEpsilon;
    double const den = sum_p + sum_g + kDiceEpsilon;
    LossValue out;
    out.value = 1.0 - num / den;
    out.gradient.resize(probs.size());
    double const den2 = den * den;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        double const g = gt[i] ? 1.0 : 0.0;
        out.gradient[i] = -(2.0 * g * den - num) / den2;
    }
    return out;
}

LossValue focal_loss(std::span<double const> probs, std::span<std::uint8_t const> gt, double alpha,
                     double gamma) {
    check_shapes(probs, gt);
    LossValue out;
    out.gradient.assign(probs.size(), 0.0);
    if (probs.empty()) {
        return out;
    }
    double const n = static_cast<double>(probs.size());
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        bool const positive = gt[i] != 0;
        double const raw = probs[i];
        double const p = std::clamp(raw, kProbClamp, 1.0 - kProbClamp);
        double const pt = positive ? p : 1.0 - p;
        double const at = positive ? alpha : 1.0 - alpha;
        double const q = 1.0 - pt;
        double const log_pt = std::log(pt);
        double const mod = gamma == 0.0 ? 1.0 : std::pow(q, gamma);
        total += -at * mod * log_pt;
        if (raw > kProbClamp && raw < 1.0 - kProbClamp) {
            // d/dpt [-a q^g ln pt] = a (g q^(g-1) ln pt - q^g / pt)
            double const dmod = gamma == 0.0 ? 0.0 : gamma * std::pow(q, gamma - 1.0);
            double const dpt = at * (dmod * log_pt - mod / pt);
            out.gradient[i] = (positive ? dpt : -dpt) / n;
        }
    }
    out.value = total / n;
    return out;
}

LossValue binary_cross_entropy(std::span<double const> probs, std::span<std::uint8_t const> gt) {
    check_shapes(probs, gt);
    LossValue out;
    out.gradient.assign(probs.size(), 0.0);
    if (probs.empty()) {
        return out;
    }
    double const n = static_cast<double>(probs.size());
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        bool const positive = gt[i] != 0;
        double const raw = probs[i];
        double const p = std::clamp(raw, kProbClamp, 1.0 - kProbClamp);
        double const pt = positive ? p : 1.0 - p;
        total += -std::log(pt);
        if (raw > kProbClamp && raw < 1.0 - kProbClamp) {
            out.gradient[i] = (positive ? -1.0 / pt : 1.0 / pt) / n;
        }
    }
    out.value = total / n;
    return out;
}

std::vector<double> softmax(std::span<double const> logits) {
    std::vector<double> out(logits.size());
    if (logits.empty()) {
        return out;
    }
    double const m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - m);
        sum += out[i];
    }
    for (auto& v : out) {
        v /= sum;
    }
    return out;
}

LossValue cross_entropy(std::span<double const> logits, std::size_t label) {
    if (logits.empty()) {
        throw ArgumentError("cross entropy needs at least one class");
    }
    if (label >= logits.size()) {
        throw ArgumentError(fmt::format("label {} out of range for {} classes", label, logits.size()));
    }
    double const m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) {
        sum += std::exp(z - m);
    }
    double const log_z = m + std::log(sum);
    LossValue out;
    out.value = log_z - logits[label];
    out.gradient.resize(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out.gradient[i] = std::exp(logits[i] - log_z) - (i == label ? 1.0 : 0.0);
    }
    return out;
}

double combined_loss(double ce, double focal, double dice, LossWeights const& w) {
    return w.ce * ce + w.focal * focal + w.dice * dice;
}

LossReport make_loss_report(double ce, double focal, double dice, LossWeights const& weights) {
    return {ce, focal, dice, combined_loss(ce, focal, dice, weights), weights};
}

} // namespace segkit
