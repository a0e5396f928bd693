#include "segkit/loss_checks.hpp"

#include "segkit/head.hpp"
#include "segkit/losses.hpp"
#include "segkit/random.hpp"

namespace segkit {

namespace {

constexpr std::size_t kPixels = 48;

struct Sample {
    std::vector<double> probs;
    std::vector<std::uint8_t> gt;
};

// probabilities stay away from the clamp so every coordinate is differentiable
Sample random_sample(Rng& rng) {
    Sample s;
    for (std::size_t i = 0; i < kPixels; ++i) {
        s.probs.push_back(rng.uniform(0.02, 0.98));
        s.gt.push_back(static_cast<std::uint8_t>(rng.uniform_int(0, 1)));
    }
    return s;
}

DifferentiableFn wrap(auto loss, std::vector<std::uint8_t> gt) {
    return [loss, gt = std::move(gt)](std::span<double const> x, std::vector<double>* grad) {
        auto v = loss(x, gt);
        if (grad) *grad = v.gradient;
        return v.value;
    };
}

GradCheckResult check_classifier(Rng& rng) {
    constexpr int channels = 5;
    constexpr std::size_t classes = 8;
    std::vector<double> pooled(channels);
    for (auto& v : pooled) v = rng.uniform(-1.0, 1.0);
    auto const label = static_cast<std::size_t>(rng.uniform_int(0, classes - 1));
    auto head = ToyHead::random(channels, classes, rng.next());
    std::vector<double> point = head.class_weights;
    point.insert(point.end(), head.class_bias.begin(), head.class_bias.end());
    for (auto& v : point) v = rng.uniform(-1.0, 1.0);

    DifferentiableFn fn = [&](std::span<double const> x, std::vector<double>* grad) {
        ToyHead h = head;
        std::copy(x.begin(), x.begin() + channels * classes, h.class_weights.begin());
        std::copy(x.begin() + channels * classes, x.end(), h.class_bias.begin());
        auto const ce = cross_entropy(class_logits(h, pooled), label);
        if (grad) {
            grad->assign(x.size(), 0.0);
            for (std::size_t k = 0; k < classes; ++k) {
                for (int c = 0; c < channels; ++c) {
                    (*grad)[k * channels + c] = ce.gradient[k] * pooled[c];
                }
                (*grad)[channels * classes + k] = ce.gradient[k];
            }
        }
        return ce.value;
    };
    return grad_check(fn, point);
}

GradCheckResult check_head(Rng& rng) {
    constexpr int channels = 5;
    constexpr int side = 12;
    constexpr std::size_t classes = 4;
    std::vector<float> values(static_cast<std::size_t>(channels) * side * side);
    for (auto& v : values) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    FeatureMap features("probe", channels, side, side, std::move(values), FeatureSource::toy_encoder);

    std::vector<std::uint8_t> gt(side * side, 0);
    int const x0 = static_cast<int>(rng.uniform_int(0, 5));
    int const y0 = static_cast<int>(rng.uniform_int(0, 5));
    for (int y = y0; y < y0 + 6; ++y) {
        for (int x = x0; x < x0 + 6; ++x) gt[y * side + x] = 1;
    }
    InstanceMask mask{BinaryMask(side, side, gt), static_cast<std::size_t>(rng.uniform_int(0, classes - 1)),
                      "probe_0", {}};
    Point const prompt{static_cast<double>(x0 + 3), static_cast<double>(y0 + 3)};
    auto head = ToyHead::random(channels, classes, rng.next(), 0.5);
    for (auto& w : head.iou_weights) w = rng.uniform(-0.5, 0.5);
    auto const selected = head_loss(head, features, {side, side}, prompt, mask, {}).selected;

    DifferentiableFn fn = [&](std::span<double const> x, std::vector<double>* grad) {
        ToyHead h = head;
        h.assign(x);
        return head_loss(h, features, {side, side}, prompt, mask, {}, grad, nullptr, selected)
            .report.total;
    };
    auto const point = head.flatten();
    return grad_check(fn, point);
}

} // namespace

std::vector<LossCheck> check_loss_gradients(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<LossCheck> out;
    auto s = random_sample(rng);
    out.push_back({"dice", grad_check(wrap([](auto p, auto const& g) { return dice_loss(p, g); }, s.gt), s.probs)});
    s = random_sample(rng);
    out.push_back({"focal", grad_check(wrap([](auto p, auto const& g) { return focal_loss(p, g); }, s.gt), s.probs)});
    s = random_sample(rng);
    out.push_back({"bce", grad_check(wrap([](auto p, auto const& g) { return binary_cross_entropy(p, g); }, s.gt),
                                     s.probs)});
    out.push_back({"cross_entropy", check_classifier(rng)});
    out.push_back({"head", check_head(rng)});
    return out;
}

LossCheck sign_flipped_dice_check(std::uint64_t seed) {
    // two pixels, one positive: both gradient entries exceed 0.3 in magnitude
    Rng rng(seed);
    std::vector<double> const probs{rng.uniform(0.5, 0.98), rng.uniform(0.02, 0.5)};
    std::vector<std::uint8_t> const gt{1, 0};
    DifferentiableFn fn = [gt](std::span<double const> x, std::vector<double>* grad) {
        auto v = dice_loss(x, gt);
        if (grad) {
            *grad = v.gradient;
            for (auto& g : *grad) g = -g;
        }
        return v.value;
    };
    return {"dice_sign_flipped", grad_check(fn, probs)};
}

} // namespace segkit
