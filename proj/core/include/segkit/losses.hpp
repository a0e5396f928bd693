#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace segkit {

inline constexpr double kDiceEpsilon = 1e-6;
inline constexpr double kProbClamp = 1e-7;

/// Loss value with its gradient with respect to the inputs.
struct LossValue {
    double value = 0.0;
    std::vector<double> gradient;
};

/// 1 - (2 sum(p g) + eps) / (sum(p) + sum(g) + eps).
LossValue dice_loss(std::span<double const> probs, std::span<std::uint8_t const> gt);

/// Mean over pixels of -alpha_t (1 - p_t)^gamma ln(p_t). Probabilities are
/// clamped to [1e-7, 1 - 1e-7]; the gradient is zero where clamping is active.
LossValue focal_loss(std::span<double const> probs, std::span<std::uint8_t const> gt,
                     double alpha = 0.25, double gamma = 2.0);

/// Mean binary cross-entropy with the same clamping as focal_loss.
LossValue binary_cross_entropy(std::span<double const> probs, std::span<std::uint8_t const> gt);

/// Softmax negative log-likelihood of `label`, gradient w.r.t. the logits.
LossValue cross_entropy(std::span<double const> logits, std::size_t label);

/// Softmax with max subtraction.
std::vector<double> softmax(std::span<double const> logits);

struct LossWeights {
    double ce = 1.0;
    double focal = 1.0;
    double dice = 1.0;
    friend bool operator==(LossWeights const&, LossWeights const&) = default;
};

double combined_loss(double ce, double focal, double dice, LossWeights const& weights = {});

struct LossReport {
    double ce = 0.0;
    double focal = 0.0;
    double dice = 0.0;
    double total = 0.0;
    LossWeights weights;
};

LossReport make_loss_report(double ce, double focal, double dice, LossWeights const& weights = {});

} // namespace segkit
